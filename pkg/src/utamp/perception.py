"""Geometric scene -> initial symbolic state.

Each side of a box owns an *associated space*: a copy of the box shifted one
full box length outward along that side's normal.  ``oc(part, o1, o2)`` holds
when the centroid of ``o2`` lies in the space associated with ``part`` of
``o1``; ``oc(part, o1, air)`` when no centroid does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .abstraction import NORMALS, SIDES, match_grasp, part_centroid, space_offset
from .geom import (
    BBox, Kind, PhysicalObject, Pose, compose, invert, obb_contains_point, obb_overlap,
)
from .symbolic import OBJ, Atom, Problem, object_identity_facts

FORCE_COS = math.cos(math.radians(5.0))


class AmbiguousOccupancy(ValueError):
    pass


class InsufficientFreeSpace(ValueError):
    pass


class PerceptionError(ValueError):
    pass


@dataclass(frozen=True)
class Scene:
    objects: Tuple[PhysicalObject, ...]
    spaces: Tuple[PhysicalObject, ...] = ()
    robot_base: Pose = Pose((1.5, 0.0, 0.45))
    reference_normal: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    hand: Optional[PhysicalObject] = None
    holding: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "spaces", tuple(self.spaces))
        ids = [o.id for o in self.objects + self.spaces]
        if len(set(ids)) != len(ids):
            raise ValueError("scene ids must be unique")
        for reserved in ("air", "hand"):
            if reserved in ids:
                raise ValueError(f"{reserved!r} is a reserved id")
        n = np.asarray(self.reference_normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("reference normal must be a unit vector")
        if self.holding is not None and self.hand is None:
            raise ValueError("a held object needs a hand pose")

    def get(self, oid: str) -> PhysicalObject:
        for o in self.objects + self.spaces:
            if o.id == oid:
                return o
        raise KeyError(oid)

    @property
    def solids(self) -> List[PhysicalObject]:
        return [o for o in self.objects if o.kind == Kind.SOLID]

    def with_object(self, obj: PhysicalObject) -> "Scene":
        objs = tuple(obj if o.id == obj.id else o for o in self.objects)
        return replace(self, objects=objs)


@dataclass(frozen=True)
class AssociatedSpace:
    owner: str
    part: str
    pose: Pose
    size: BBox


def associated_space(obj: PhysicalObject, part: str) -> AssociatedSpace:
    center = obj.pose.transform_point(space_offset(part, obj.size))
    return AssociatedSpace(obj.id, part, Pose(tuple(center), obj.pose.rpy, obj.pose.frame), obj.size)


def _occupant(space: AssociatedSpace, candidates: Iterable[PhysicalObject]) -> str:
    inside = sorted(c.id for c in candidates
                    if c.id != space.owner and obb_contains_point(space.pose, space.size, c.pose.position))
    if len(inside) > 1:
        raise AmbiguousOccupancy(f"{space.part} of {space.owner} holds {inside}")
    return inside[0] if inside else "air"


def base_side(obj: PhysicalObject, robot_base: Pose, sides=SIDES) -> str:
    best, best_d = None, None
    for side in sides:
        c = obj.pose.transform_point(part_centroid(side, obj.size))
        d = float(np.linalg.norm(c - robot_base.p))
        if best_d is None or d < best_d - 1e-12:
            best, best_d = side, d
    return best


def force_sides(obj: PhysicalObject, reference_normal) -> List[str]:
    n = np.asarray(reference_normal, dtype=float)
    R = obj.pose.R
    return [s for s in SIDES if float((R @ NORMALS[s]) @ n) > FORCE_COS]


def container_of(scene: Scene) -> Dict[str, str]:
    """Map each solid absorbed by a container space to that space."""
    out: Dict[str, str] = {}
    for o in scene.solids:
        if o.id == scene.holding:
            continue
        hits = sorted(s.id for s in scene.spaces
                      if s.container and obb_contains_point(s.pose, s.size, o.pose.position))
        if len(hits) > 1:
            raise AmbiguousOccupancy(f"{o.id} lies in spaces {hits}")
        if hits:
            out[o.id] = hits[0]
    return out


def held_grasp(scene: Scene):
    obj = scene.get(scene.holding)
    rel = compose(invert(obj.pose), scene.hand.pose)
    g = match_grasp(rel)
    if g is None:
        raise PerceptionError(f"hand pose does not match any grasp of {obj.id}")
    return g


def perceive(scene: Scene) -> FrozenSet[Atom]:
    atoms = set()
    absorbed = container_of(scene)
    solids = scene.solids
    free_solids = [o for o in solids if o.id not in absorbed and o.id != scene.holding]

    for s in scene.spaces:
        occupants = [o for o in solids if absorbed.get(o.id) == s.id]
        atoms.add(("oc", "in", s.id, occupants[0].id if occupants else "air"))
        for side in SIDES:
            atoms.add(("oc", side, s.id, _occupant(associated_space(s, side), scene.spaces)))
        atoms.add(("base", s.id, base_side(s, scene.robot_base)))
        if s.container:
            atoms.add(("force", s.id, "in"))

    for o in solids:
        if o.id in absorbed:
            continue
        hand_parts = ()
        if o.id == scene.holding:
            hand_parts = tuple(held_grasp(scene))
            for part in hand_parts:
                atoms.add(("oc", part, o.id, "hand"))
        for side in SIDES:
            if side not in hand_parts:
                atoms.add(("oc", side, o.id, _occupant(associated_space(o, side), free_solids)))
        if o.id != scene.holding:
            atoms.add(("base", o.id, base_side(o, scene.robot_base)))
            for side in force_sides(o, scene.reference_normal):
                atoms.add(("force", o.id, side))

    atoms.add(("oc", "in", "hand", scene.holding or "air"))
    return frozenset(atoms)


def make_problem(scene: Scene, goal: Iterable[Atom], domain_name: str,
                 statics: Iterable[Atom] = (), extra_facts: Iterable[Atom] = (),
                 name: str = "scene") -> Problem:
    objects = tuple((o.id, OBJ) for o in scene.solids) + tuple((s.id, OBJ) for s in scene.spaces)
    init = (perceive(scene) | frozenset(statics) | frozenset(extra_facts)
            | object_identity_facts([n for n, _ in objects] + ["air", "hand"]))
    return Problem(name, domain_name, objects, init, tuple(goal))


def generate_table_parts(scene: Scene, requested: int = 0, table_id: str = "table",
                         part_height: float = 0.03, cell: Optional[float] = None,
                         prefix: str = "table") -> List[PhysicalObject]:
    """Tabletop support parts under resting objects, plus free cells on request.

    Parts are footprint-sized slabs whose top face is the table surface.
    Free cells are scanned along +x, then +y.
    """
    table = scene.get(table_id)
    top = table.pose.transform_point((0.0, 0.0, table.size.dz / 2.0))
    top_z = float(top[2])
    parts: List[PhysicalObject] = []

    def slab(x, y, yaw, dx, dy):
        pose = Pose((x, y, top_z - part_height / 2.0), (0.0, 0.0, yaw))
        return PhysicalObject(f"{prefix}{len(parts) + 1}", pose, BBox(dx, dy, part_height),
                              Kind.SOLID, movable=False)

    movables = sorted((o for o in scene.solids if o.movable), key=lambda o: o.id)
    absorbed = container_of(scene)
    for o in movables:
        if o.id in absorbed:
            continue
        bottom = o.pose.transform_point(part_centroid("under", o.size))
        if abs(bottom[2] - top_z) < 1e-6 and obb_contains_point(
                table.pose, table.size, (bottom[0], bottom[1], top_z)):
            parts.append(slab(o.pose.position[0], o.pose.position[1], o.pose.rpy[2],
                              o.size.dx, o.size.dy))

    if requested <= 0:
        return parts
    foot = max((max(o.size.dx, o.size.dy) for o in movables), default=0.05)
    cell = cell or foot * 1.1
    column_h = max((o.size.dz for o in movables), default=0.05) * 2
    obstacles = [(o.pose, o.size) for o in scene.objects
                 if o.kind == Kind.SOLID] + [(s.pose, s.size) for s in scene.spaces]
    nx = int(table.size.dx // cell)
    ny = int(table.size.dy // cell)
    found = 0
    for j in range(ny):
        for i in range(nx):
            local = ((i + 0.5) * cell - table.size.dx / 2, (j + 0.5) * cell - table.size.dy / 2,
                     table.size.dz / 2 + column_h / 2)
            c = table.pose.transform_point(local)
            probe = (Pose(tuple(c), table.pose.rpy), BBox(cell, cell, column_h))
            if any(obb_overlap(probe, ob, margin=1e-9) for ob in obstacles):
                continue
            part = slab(c[0], c[1], table.pose.rpy[2], foot, foot)
            parts.append(part)
            obstacles.append(probe)
            found += 1
            if found == requested:
                return parts
    raise InsufficientFreeSpace(f"only {found} free cells, {requested} requested")
