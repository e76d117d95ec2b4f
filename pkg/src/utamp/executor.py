"""Plan -> motion commands -> kinematic replay.

Each pick becomes a free move ending at the grasp pose followed by a grasp;
each place becomes a holding move followed by a release.  Trajectories are
natural cubic splines through a handful of knots:

    current pose -> retreat (pre-pose of the last contact) -> lifted
    -> above the new pre-pose -> pre-pose -> target

Clean/cook actions carry no motion; they become :class:`Operate` commands
that check the object really sits on the device before toggling its status.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .abstraction import (
    GraspConfig, IllegalGrasp, IllegalPlacement, PlacementConfig, grasp_hand_pose,
    placement_pose, pregrasp_pose, preplace_position, space_offset,
)
from .geom import BBox, Kind, PhysicalObject, Pose, compose, invert, obb_overlap, poses_close
from .perception import Scene, perceive
from .symbolic import Atom, GroundAction

log = logging.getLogger(__name__)

N_SAMPLES = 50
LIFT = 0.15


class DecomposeError(ValueError):
    pass


class CollisionDetected(RuntimeError):
    def __init__(self, step: int, pair: Tuple[str, str]):
        super().__init__(f"collision at command {step}: {pair[0]} / {pair[1]}")
        self.step = step
        self.pair = pair


class GoalUnsatisfied(RuntimeError):
    def __init__(self, missing):
        self.missing = tuple(sorted(missing))
        super().__init__("goal atoms not perceived: " + ", ".join(" ".join(a) for a in self.missing))


@dataclass(frozen=True)
class HandModel:
    """Box envelope of palm and fingers in the hand frame.

    +z points from the palm towards the object; the box runs from ``back``
    behind the palm to ``reach`` in front of it (finger tips).
    """

    thickness: float = 0.04
    span: float = 0.07
    back: float = 0.06
    reach: float = 0.025

    def box(self, hand: Pose) -> Tuple[Pose, BBox]:
        centre = hand.transform_point((0.0, 0.0, (self.reach - self.back) / 2.0))
        return Pose(tuple(centre), hand.rpy), BBox(self.thickness, self.span, self.back + self.reach)


# ---------------------------------------------------------------------------
# trajectories

def _unwrap(rpys: Sequence[Sequence[float]]) -> np.ndarray:
    out = [np.asarray(rpys[0], dtype=float)]
    for w in rpys[1:]:
        w = np.asarray(w, dtype=float)
        prev = out[-1]
        out.append(prev + (w - prev + math.pi) % (2 * math.pi) - math.pi)
    return np.array(out)


@dataclass(frozen=True)
class Trajectory:
    waypoints: Tuple[Pose, ...]
    samples: Tuple[Pose, ...]
    knot_index: Tuple[int, ...]   # sample index of each kept waypoint

    @property
    def start(self) -> Pose:
        return self.samples[0]

    @property
    def end(self) -> Pose:
        return self.samples[-1]


def spline(waypoints: Sequence[Pose], n: int = N_SAMPLES) -> Trajectory:
    """Natural cubic spline per pose component, parametrised by chord length.

    The ``n`` uniform samples are merged with the knots themselves, so every
    waypoint appears exactly in the output.  Consecutive duplicates are dropped.
    """
    if len(waypoints) < 2:
        raise ValueError("a trajectory needs at least two waypoints")
    if n < 2:
        raise ValueError("need at least two samples")
    kept = [waypoints[0]]
    for w in waypoints[1:]:
        if not poses_close(w, kept[-1], 1e-12):
            kept.append(w)
        elif len(kept) > 1:
            kept[-1] = w        # keep the later copy so the end is exact
    frame = waypoints[0].frame
    if len(kept) == 1:
        return Trajectory(tuple(waypoints), tuple([kept[0]] * n), (0, n - 1))
    P = np.array([w.position for w in kept])
    W = _unwrap([w.rpy for w in kept])
    step = np.linalg.norm(np.diff(P, axis=0), axis=1) + 0.1 * np.linalg.norm(np.diff(W, axis=0), axis=1)
    t = np.concatenate([[0.0], np.cumsum(step)])
    t /= t[-1]
    ts = np.union1d(np.linspace(0.0, 1.0, n), t)
    if len(kept) == 2:
        # a natural spline through two points is the straight segment
        Ps = P[0] + np.outer(ts, P[1] - P[0])
        Ws = W[0] + np.outer(ts, W[1] - W[0])
    else:
        Ps = CubicSpline(t, P, bc_type="natural")(ts)
        Ws = CubicSpline(t, W, bc_type="natural")(ts)
    knot_idx = tuple(int(np.searchsorted(ts, v)) for v in t)
    samples = [Pose(tuple(p), tuple(w), frame) for p, w in zip(Ps, Ws)]
    # the knots are reproduced from the input, not from the fitted values
    for k, i in enumerate(knot_idx):
        samples[i] = Pose(kept[k].position, kept[k].rpy, frame)
    return Trajectory(tuple(waypoints), tuple(samples), knot_idx)


# ---------------------------------------------------------------------------
# commands

@dataclass(frozen=True)
class MoveFree:
    trajectory: Trajectory
    kind: str = "moveF"


@dataclass(frozen=True)
class MoveHolding:
    object: str
    trajectory: Trajectory
    kind: str = "moveH"


@dataclass(frozen=True)
class Grasp:
    object: str
    config: GraspConfig
    target: Pose
    retreat: Pose
    support: Optional[str] = None
    kind: str = "grasp"


@dataclass(frozen=True)
class Release:
    object: str
    config: Union[PlacementConfig, str]   # "in" for container spaces
    target: Pose
    support: str
    object_pose: Pose
    retreat: Pose
    kind: str = "release"


@dataclass(frozen=True)
class Operate:
    action: str
    object: str
    device: str
    adds: Tuple[Atom, ...]
    kind: str = "operate"


MotionCommand = Union[MoveFree, MoveHolding, Grasp, Release, Operate]


# ---------------------------------------------------------------------------
# kinematic world

@dataclass
class SimWorld:
    scene: Scene
    hand: Pose
    objects: Dict[str, PhysicalObject] = field(default_factory=dict)
    attached: Optional[Tuple[str, Pose]] = None    # (object, object pose in hand frame)
    retreat: Optional[Pose] = None
    contact: Tuple[str, ...] = ()                  # bodies touched by the last grasp/release
    status: set = field(default_factory=set)
    trace: List[dict] = field(default_factory=list)

    @classmethod
    def from_scene(cls, scene: Scene) -> "SimWorld":
        hand = scene.hand.pose if scene.hand is not None else Pose((1.0, 0.0, 0.8))
        return cls(scene, hand, {o.id: o for o in scene.objects})

    def pose(self, oid: str) -> Pose:
        if oid in self.objects:
            return self.objects[oid].pose
        return self.scene.get(oid).pose

    def size(self, oid: str) -> BBox:
        if oid in self.objects:
            return self.objects[oid].size
        return self.scene.get(oid).size

    def move_hand(self, pose: Pose):
        self.hand = pose
        if self.attached is not None:
            oid, rel = self.attached
            self.objects[oid] = self.objects[oid].moved(compose(pose, rel))

    def to_scene(self) -> Scene:
        objs = tuple(self.objects[o.id] for o in self.scene.objects)
        holding = self.attached[0] if self.attached else None
        if self.scene.hand is not None:
            hand = self.scene.hand.moved(self.hand)
        elif holding is not None:
            hand = PhysicalObject("hand", self.hand, HandModel().box(self.hand)[1], Kind.HAND)
        else:
            hand = None
        return Scene(objs, self.scene.spaces, self.scene.robot_base, self.scene.reference_normal,
                     hand, holding)


def _travel_height(world: SimWorld) -> float:
    tops = [o.pose.position[2] + max(o.size.as_tuple()) / 2.0
            for o in world.objects.values() if o.kind == Kind.SOLID]
    return max(tops, default=0.0) + LIFT


def _path(world: SimWorld, pre: Pose, target: Pose) -> List[Pose]:
    z = _travel_height(world)
    pts = [world.hand]
    if world.retreat is not None:
        pts.append(world.retreat)
    last = pts[-1]
    pts.append(Pose((last.position[0], last.position[1], max(z, last.position[2])), last.rpy))
    pts.append(Pose((pre.position[0], pre.position[1], max(z, pre.position[2])), pre.rpy))
    pts += [pre, target]
    return pts


def _binding(action: GroundAction) -> Dict[str, str]:
    b = action.binding
    if not b:
        raise DecomposeError(f"{action} carries no parameter binding")
    return b


def decompose(plan: Sequence[GroundAction], scene: Scene, n: int = N_SAMPLES) -> List[MotionCommand]:
    """Motion commands for ``plan`` starting from ``scene``.

    Poses are computed on a shadow copy of the world that is advanced as the
    commands are produced, so later actions see where earlier ones left things.
    """
    world = SimWorld.from_scene(scene)
    out: List[MotionCommand] = []
    for action in plan:
        b = _binding(action)
        name = action.name
        if name in ("pick", "pick-space"):
            o1, o2 = b["?o1"], b["?o2"]
            cfg = GraspConfig(b["?o1-h-p"], b["?o1-h-f1"], b["?o1-h-f2"])
            if not cfg.legal:
                raise DecomposeError(f"{action}: illegal grasp {tuple(cfg)}")
            obj, size = world.pose(o1), world.size(o1)
            target = compose(obj, grasp_hand_pose(cfg, size))
            pre = pregrasp_pose(obj, cfg, size)
            traj = spline(_path(world, pre, target), n)
            support = o2 if name == "pick" else None
            cmds = [MoveFree(traj), Grasp(o1, cfg, target, pre, support)]
        elif name in ("place", "place-space"):
            o1, o2 = b["?o1"], b["?o2"]
            if world.attached is None or world.attached[0] != o1:
                raise DecomposeError(f"{action}: {o1} is not held")
            rel = world.attached[1]
            hand_in_obj = invert(rel)
            support_pose = world.pose(o2)
            if name == "place":
                cfg = PlacementConfig(b["?o1-o2"], b["?o2-o1"])
                if not cfg.legal or cfg.placed == "in":
                    raise DecomposeError(f"{action}: illegal placement {tuple(cfg)}")
                rel_obj = placement_pose(cfg, world.size(o1), world.size(o2))
                obj_final = compose(support_pose, rel_obj)
                pre_pos = preplace_position(support_pose, space_offset(cfg.support, world.size(o2)))
                pre = compose(Pose(tuple(pre_pos), obj_final.rpy), hand_in_obj)
            else:
                cfg = "in"
                obj_final = Pose(support_pose.position, support_pose.rpy, support_pose.frame)
                grasp = GraspConfig(b["?o1-h-p"], b["?o1-h-f1"], b["?o1-h-f2"])
                pre = pregrasp_pose(obj_final, grasp, world.size(o1))
            target = compose(obj_final, hand_in_obj)
            traj = spline(_path(world, pre, target), n)
            cmds = [MoveHolding(o1, traj), Release(o1, cfg, target, o2, obj_final, pre)]
        elif name in ("clean", "cook"):
            o, dev = b["?o"], b.get("?d", b.get("?m"))
            cmds = [Operate(name, o, dev, tuple(sorted(action.add)))]
        else:
            raise DecomposeError(f"no motion template for action {name!r}")
        for c in cmds:
            _effect(world, c)
        out.extend(cmds)
    return out


def _effect(world: SimWorld, cmd: MotionCommand):
    """Kinematic effect of a command, without any checking."""
    if isinstance(cmd, (MoveFree, MoveHolding)):
        world.move_hand(cmd.trajectory.end)
        world.retreat = None
    elif isinstance(cmd, Grasp):
        world.move_hand(cmd.target)
        rel = compose(invert(cmd.target), world.pose(cmd.object))
        world.attached = (cmd.object, rel)
        world.retreat = cmd.retreat
        world.contact = tuple(x for x in (cmd.object, cmd.support) if x)
    elif isinstance(cmd, Release):
        world.objects[cmd.object] = world.objects[cmd.object].moved(cmd.object_pose)
        world.attached = None
        world.retreat = cmd.retreat
        world.contact = (cmd.object, cmd.support)
    elif isinstance(cmd, Operate):
        world.status.update(cmd.adds)


# ---------------------------------------------------------------------------
# simulation

@dataclass
class ExecutionReport:
    success: bool
    collisions: List[dict]
    final_scene: Scene
    trace: List[dict]
    missing: Tuple[Atom, ...] = ()
    status: Tuple[Atom, ...] = ()
    error: Optional[str] = None

    def to_dict(self) -> dict:
        from .scenefile import scene_to_dict
        return {
            "success": self.success,
            "error": self.error,
            "collisions": self.collisions,
            "missing": [list(a) for a in self.missing],
            "status": [list(a) for a in self.status],
            "trace": self.trace,
            "final_scene": scene_to_dict(self.final_scene),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def raise_for_failure(self):
        if self.collisions:
            c = self.collisions[0]
            raise CollisionDetected(c["command"], tuple(c["pair"]))
        if self.missing:
            raise GoalUnsatisfied(self.missing)
        if self.error:
            raise RuntimeError(self.error)


def _radius(size: BBox) -> float:
    return float(np.linalg.norm(size.half))


def _hits(moving: List[Tuple[str, Pose, BBox]], world: SimWorld, skip: set, allowed: set):
    out = []
    others = [o for o in world.objects.values()
              if o.kind in (Kind.SOLID, Kind.FIXTURE) and o.id not in skip]
    for mid, mpose, msize in moving:
        mr = _radius(msize)
        for o in others:
            if (mid, o.id) in allowed or ("*", o.id) in allowed:
                continue
            if np.linalg.norm(mpose.p - o.pose.p) > mr + _radius(o.size):
                continue
            if obb_overlap((mpose, msize), (o.pose, o.size), margin=1e-6):
                out.append((mid, o.id))
    return out


def _rnd(v):
    return [round(float(x), 12) + 0.0 for x in v]   # + 0.0 folds -0.0 into 0.0


def simulate(commands: Sequence[MotionCommand], scene: Scene, goal: Sequence[Atom] = (),
             hand: HandModel = HandModel(), strict: bool = False) -> ExecutionReport:
    """Replay ``commands`` kinematically, checking collisions at every sample.

    Contacts with the grasp/release target and its support are allowed on the
    segment that reaches the contact (pre-pose -> target) and on the segment
    that leaves it (current -> retreat).  Success means no collision and every
    goal atom is perceived in the final scene (or set by an operate command).
    """
    world = SimWorld.from_scene(scene)
    collisions: List[dict] = []
    error = None

    def record(i, cmd, extra=None):
        entry = {"command": i, "kind": cmd.kind, "hand": _rnd(world.hand.position) + _rnd(world.hand.rpy)}
        if world.attached:
            entry["holding"] = world.attached[0]
        if extra:
            entry.update(extra)
        world.trace.append(entry)

    for i, cmd in enumerate(commands):
        if isinstance(cmd, (MoveFree, MoveHolding)):
            traj = cmd.trajectory
            if isinstance(cmd, MoveHolding) and (world.attached is None or world.attached[0] != cmd.object):
                error = f"command {i}: moveH without holding {cmd.object}"
                break
            if isinstance(cmd, MoveFree) and world.attached is not None:
                error = f"command {i}: moveF while holding {world.attached[0]}"
                break
            if not poses_close(traj.start, world.hand, 1e-9):
                error = f"command {i}: trajectory does not start at the hand pose"
                break
            nxt = commands[i + 1] if i + 1 < len(commands) else None
            approach = set()
            if isinstance(nxt, Grasp):
                approach = {("*", nxt.object)} | ({("*", nxt.support)} if nxt.support else set())
            elif isinstance(nxt, Release):
                approach = {("*", nxt.support)}
            # blocks in container spaces rest on the table itself
            fixtures = {("*", o.id) for o in world.objects.values() if o.kind == Kind.FIXTURE}
            approach |= fixtures
            depart = {("*", c) for c in world.contact} | fixtures
            k_depart = traj.knot_index[1] if world.retreat is not None else 0
            k_approach = traj.knot_index[-2]
            held = world.attached[0] if world.attached else None
            for k, pose in enumerate(traj.samples):
                world.move_hand(pose)
                moving = [("hand",) + hand.box(pose)]
                if held:
                    o = world.objects[held]
                    moving.append((held, o.pose, o.size))
                allowed = set()
                if k <= k_depart:
                    allowed |= depart
                if k >= k_approach:
                    allowed |= approach
                for pair in _hits(moving, world, {held} if held else set(), allowed):
                    collisions.append({"command": i, "sample": k, "pair": list(pair)})
            world.retreat = None
            record(i, cmd, {"samples": len(traj.samples)})
        elif isinstance(cmd, Grasp):
            if world.attached is not None:
                error = f"command {i}: grasp with a full hand"
                break
            if not poses_close(world.hand, cmd.target, 1e-9):
                error = f"command {i}: hand is not at the grasp pose"
                break
            _effect(world, cmd)
            record(i, cmd, {"object": cmd.object})
        elif isinstance(cmd, Release):
            if world.attached is None or world.attached[0] != cmd.object:
                error = f"command {i}: release of {cmd.object}, which is not held"
                break
            _effect(world, cmd)
            record(i, cmd, {"object": cmd.object, "pose": _rnd(cmd.object_pose.position) + _rnd(cmd.object_pose.rpy)})
        elif isinstance(cmd, Operate):
            atoms = perceive(world.to_scene())
            if ("oc", "on", cmd.device, cmd.object) not in atoms:
                error = f"command {i}: {cmd.object} is not on {cmd.device}"
                break
            _effect(world, cmd)
            record(i, cmd, {"object": cmd.object, "device": cmd.device})
        if strict and collisions:
            break

    final = world.to_scene()
    missing: Tuple[Atom, ...] = ()
    if error is None:
        have = perceive(final) | world.status
        missing = tuple(sorted(set(goal) - have))
    report = ExecutionReport(not collisions and not missing and error is None, collisions, final,
                             world.trace, missing, tuple(sorted(world.status)), error)
    if strict:
        report.raise_for_failure()
    return report
