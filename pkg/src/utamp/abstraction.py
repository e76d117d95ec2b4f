"""Functional parts of bounding boxes and their mapping to relative poses.

A part names a side of an object's bounding box (``on`` is +z, ``front`` is
+x, ``left`` is +y) or its interior (``in``).  Grasps are triples
``(palm, finger1, finger2)`` of parts; placements are pairs
``(placed_part, support_part)``.

Hand frame used throughout: +z is the approach axis (out of the palm, towards
the object) and +y points from finger 2 towards finger 1.  A grasp therefore
sends hand -z onto the palm side's outward normal and hand +y onto finger 1's
outward normal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from .geom import BBox, Pose, compose, geodesic_angle, matrix_to_rpy, rpy_to_matrix

PARTS = ("on", "under", "left", "right", "front", "back", "in")
SIDES = PARTS[:6]

OPPOSITE = {
    "on": "under", "under": "on",
    "left": "right", "right": "left",
    "front": "back", "back": "front",
    "in": "in",
}

NORMALS: Dict[str, np.ndarray] = {
    "on": np.array([0.0, 0.0, 1.0]),
    "under": np.array([0.0, 0.0, -1.0]),
    "left": np.array([0.0, 1.0, 0.0]),
    "right": np.array([0.0, -1.0, 0.0]),
    "front": np.array([1.0, 0.0, 0.0]),
    "back": np.array([-1.0, 0.0, 0.0]),
}

_AXIS = {"on": 2, "under": 2, "left": 1, "right": 1, "front": 0, "back": 0}


class IllegalGrasp(ValueError):
    pass


class IllegalPlacement(ValueError):
    pass


def opposite(part: str) -> str:
    return OPPOSITE[part]


def side_from_normal(n: Sequence[float], tol: float = 1e-6) -> str:
    """Name of the side whose outward normal is ``n`` (axis-aligned only)."""
    n = np.asarray(n, dtype=float)
    for side, v in NORMALS.items():
        if np.max(np.abs(v - n)) < tol:
            return side
    raise ValueError(f"{n} is not an axis-aligned unit normal")


class GraspConfig(NamedTuple):
    palm: str
    f1: str
    f2: str

    @property
    def legal(self) -> bool:
        p, f1, f2 = self
        return (
            p in SIDES and f1 in SIDES and f2 in SIDES
            and f1 == OPPOSITE[f2]
            and p not in (f1, f2, OPPOSITE[f1])
        )


class PlacementConfig(NamedTuple):
    placed: str   # part of the placed object touching the support
    support: str  # part of the support touching the placed object

    @property
    def legal(self) -> bool:
        if self.placed == "in" or self.support == "in":
            return self.placed == self.support == "in"
        return self.placed in SIDES and self.support in SIDES


def _vec(size) -> np.ndarray:
    if isinstance(size, BBox):
        return np.array(size.as_tuple())
    return np.asarray(size, dtype=float)


def part_centroid(part: str, size) -> np.ndarray:
    """Centroid of a bounding-box side in the object's frame."""
    if part == "in":
        return np.zeros(3)
    return NORMALS[part] * _vec(size)[_AXIS[part]] / 2.0


def space_offset(part: str, size) -> np.ndarray:
    """Centre of the space associated with ``part``: one full box length out."""
    if part == "in":
        return np.zeros(3)
    return NORMALS[part] * _vec(size)[_AXIS[part]]


def enumerate_legal_grasps() -> List[GraspConfig]:
    return [g for g in (GraspConfig(*t) for t in itertools.product(SIDES, repeat=3)) if g.legal]


def enumerate_surface_placements() -> List[PlacementConfig]:
    return [PlacementConfig(a, b) for a in SIDES for b in SIDES]


@lru_cache(maxsize=None)
def _grasp_rotation(cfg: GraspConfig) -> Tuple[Tuple[float, ...], ...]:
    # columns are images of the hand axes: R e_z = -n_palm, R e_y = n_f1
    z = -NORMALS[cfg.palm]
    y = NORMALS[cfg.f1]
    x = np.cross(y, z)
    return tuple(map(tuple, np.column_stack([x, y, z])))


def grasp_rotation(cfg: GraspConfig) -> np.ndarray:
    if not GraspConfig(*cfg).legal:
        raise IllegalGrasp(f"{tuple(cfg)} is not a legal grasp")
    return np.array(_grasp_rotation(GraspConfig(*cfg)))


def grasp_hand_pose(cfg: GraspConfig, size) -> Pose:
    """Hand pose in the grasped object's frame."""
    R = grasp_rotation(cfg)
    return Pose(tuple(part_centroid(cfg[0], size)), matrix_to_rpy(R, fallback=True))


@lru_cache(maxsize=None)
def axis_rotations() -> Tuple[Tuple[Tuple[float, ...], Tuple[Tuple[float, ...], ...]], ...]:
    """The 24 proper rotations that map box axes onto box axes, with their rpy."""
    out = []
    angles = (0.0, math.pi / 2, math.pi, -math.pi / 2)
    seen = []
    for yaw, pitch, roll in itertools.product(angles, repeat=3):
        R = np.round(rpy_to_matrix((roll, pitch, yaw)))
        if any(np.array_equal(R, S) for S in seen):
            continue
        seen.append(R)
        out.append((matrix_to_rpy(R, fallback=True), tuple(map(tuple, R))))
    return tuple(out)


def _rank(rpy, R):
    roll, pitch, yaw = (abs(v) for v in rpy)
    return (round(geodesic_angle(np.array(R)), 9), round(yaw, 9), round(pitch, 9), round(roll, 9))


@lru_cache(maxsize=None)
def _placement_rotation(placed: str, support: str) -> Tuple[Tuple[float, ...], ...]:
    target = -NORMALS[support]
    best = None
    for rpy, R in axis_rotations():
        M = np.array(R)
        if np.max(np.abs(M @ NORMALS[placed] - target)) > 1e-9:
            continue
        key = _rank(rpy, R)
        if best is None or key < best[0]:
            best = (key, R)
    return best[1]


def placement_rotation(cfg: PlacementConfig) -> np.ndarray:
    cfg = PlacementConfig(*cfg)
    if not cfg.legal:
        raise IllegalPlacement(f"{tuple(cfg)} is not a legal placement")
    if cfg.placed == "in":
        return np.eye(3)
    return np.array(_placement_rotation(cfg.placed, cfg.support))


def placement_pose(cfg: PlacementConfig, placed_size, support_size) -> Pose:
    """Pose of the placed object in the support's frame.

    The rotation is the smallest one turning the placed part to face the
    support part; ties go to the candidate with the least yaw.
    """
    cfg = PlacementConfig(*cfg)
    R = placement_rotation(cfg)
    if cfg.placed == "in":
        return Pose.identity()
    half_extent = _vec(placed_size)[_AXIS[cfg.placed]] / 2.0
    pos = part_centroid(cfg.support, support_size) + NORMALS[cfg.support] * half_extent
    return Pose(tuple(pos), matrix_to_rpy(R, fallback=True))


def hand_world_pose(object_world: Pose, hand_in_object: Pose) -> Pose:
    return compose(object_world, hand_in_object)


def object_world_from_support(support_world: Pose, object_in_support: Pose) -> Pose:
    return compose(support_world, object_in_support)


def pregrasp_position(object_world: Pose, cfg: GraspConfig, size, factor: float = 3.0) -> np.ndarray:
    if not GraspConfig(*cfg).legal:
        raise IllegalGrasp(f"{tuple(cfg)} is not a legal grasp")
    return object_world.transform_point(factor * part_centroid(cfg[0], size))


def pregrasp_pose(object_world: Pose, cfg: GraspConfig, size, factor: float = 3.0) -> Pose:
    """Pre-grasp hand pose: scaled-out position, final grasp orientation."""
    hand = hand_world_pose(object_world, grasp_hand_pose(cfg, size))
    return Pose(tuple(pregrasp_position(object_world, cfg, size, factor)), hand.rpy, hand.frame)


def preplace_position(support_world: Pose, placed_part_space_offset, factor: float = 3.0) -> np.ndarray:
    return support_world.transform_point(factor * np.asarray(placed_part_space_offset, dtype=float))


def base_to_base(support_base: str, cfg: PlacementConfig) -> str:
    """Side of the placed object that ends up facing the way ``support_base`` faces."""
    R = placement_rotation(cfg)
    return side_from_normal(R.T @ NORMALS[support_base])


def match_grasp(hand_in_object: Pose, tol: float = 1e-6):
    """Inverse of :func:`grasp_hand_pose` on orientation; None when no grasp matches."""
    R = hand_in_object.R
    for g in enumerate_legal_grasps():
        if np.max(np.abs(grasp_rotation(g) - R)) < tol:
            return g
    return None
