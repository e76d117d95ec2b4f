"""Rigid-body pose arithmetic and oriented-box tests.

Orientations are roll/pitch/yaw triples ``(roll, pitch, yaw)`` composed in the
"XYZ" sequence, i.e. ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.  Poses are
immutable; every operation returns a new value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

Vec3 = Tuple[float, float, float]
Rpy = Tuple[float, float, float]

GIMBAL_EPS = 1e-9
CONTAIN_EPS = 1e-9


class GimbalLock(ValueError):
    """Raised when pitch is +-pi/2 and roll/yaw cannot be separated."""


class FrameMismatch(ValueError):
    pass


def Rx(roll: float) -> np.ndarray:
    c, s = math.cos(roll), math.sin(roll)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def Ry(pitch: float) -> np.ndarray:
    c, s = math.cos(pitch), math.sin(pitch)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def Rz(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rpy_to_matrix(w: Sequence[float]) -> np.ndarray:
    roll, pitch, yaw = w
    return Rz(yaw) @ Ry(pitch) @ Rx(roll)


def matrix_to_rpy(R: np.ndarray, fallback: bool = False) -> Rpy:
    """Recover ``(roll, pitch, yaw)`` from a rotation matrix.

    With ``fallback=True`` a gimbal-locked matrix is resolved by fixing
    roll to zero and folding the remaining rotation into yaw; otherwise
    :class:`GimbalLock` is raised.
    """
    R = np.asarray(R, dtype=float)
    cb = math.hypot(R[2, 1], R[2, 2])
    if cb < GIMBAL_EPS:
        if not fallback:
            raise GimbalLock("pitch is +-pi/2; roll and yaw are coupled")
        pitch = math.atan2(-R[2, 0], cb)
        # roll = 0  =>  R = Rz(yaw) Ry(pitch); second column is (-sin yaw, cos yaw, 0)
        yaw = math.atan2(-R[0, 1], R[1, 1])
        return (0.0, pitch, yaw)
    yaw = math.atan2(R[1, 0], R[0, 0])
    pitch = math.atan2(-R[2, 0], cb)
    roll = math.atan2(R[2, 1], R[2, 2])
    return (roll, pitch, yaw)


def angle_diff(a: float, b: float) -> float:
    """Smallest signed difference ``a - b`` modulo 2*pi (so +pi and -pi are equal)."""
    d = math.fmod(a - b, 2.0 * math.pi)
    if d > math.pi:
        d -= 2.0 * math.pi
    elif d < -math.pi:
        d += 2.0 * math.pi
    return d


def angles_close(a: Sequence[float], b: Sequence[float], tol: float = 1e-9) -> bool:
    return all(abs(angle_diff(x, y)) <= tol for x, y in zip(a, b))


def is_rotation(R: np.ndarray, tol: float = 1e-9) -> bool:
    R = np.asarray(R, dtype=float)
    return (
        R.shape == (3, 3)
        and float(np.max(np.abs(R.T @ R - np.eye(3)))) < tol
        and abs(np.linalg.det(R) - 1.0) < tol
    )


def geodesic_angle(R: np.ndarray) -> float:
    """Rotation angle of ``R`` in [0, pi]."""
    c = (np.trace(R) - 1.0) / 2.0
    return math.acos(max(-1.0, min(1.0, c)))


@dataclass(frozen=True)
class Pose:
    """Position + roll/pitch/yaw, expressed in reference frame ``frame``.

    ``name`` optionally identifies the frame this pose defines, so that
    chained compositions can be checked.
    """

    position: Vec3 = (0.0, 0.0, 0.0)
    rpy: Rpy = (0.0, 0.0, 0.0)
    frame: Optional[str] = None
    name: Optional[str] = None

    def __post_init__(self):
        p = tuple(float(v) for v in self.position)
        w = tuple(float(v) for v in self.rpy)
        if len(p) != 3 or len(w) != 3:
            raise ValueError("position and rpy must have three components")
        if not all(math.isfinite(v) for v in p + w):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "rpy", w)

    @classmethod
    def identity(cls, frame: Optional[str] = None, name: Optional[str] = None) -> "Pose":
        return cls((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), frame, name)

    @classmethod
    def from_matrix(cls, T: np.ndarray, frame=None, name=None) -> "Pose":
        T = np.asarray(T, dtype=float)
        return cls(tuple(T[:3, 3]), matrix_to_rpy(T[:3, :3], fallback=True), frame, name)

    @property
    def p(self) -> np.ndarray:
        return np.array(self.position)

    @property
    def R(self) -> np.ndarray:
        return rpy_to_matrix(self.rpy)

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous transform."""
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.position
        return T

    def transform_point(self, point: Sequence[float]) -> np.ndarray:
        return self.p + self.R @ np.asarray(point, dtype=float)

    def with_names(self, frame=None, name=None) -> "Pose":
        return Pose(self.position, self.rpy, frame, name)


def compose(parent: Pose, child: Pose) -> Pose:
    """Express ``child`` (given in ``parent``'s frame) in ``parent``'s reference frame."""
    if parent.name is not None and child.frame is not None and parent.name != child.frame:
        raise FrameMismatch(f"child is in frame {child.frame!r}, parent defines {parent.name!r}")
    Rp = parent.R
    pos = parent.p + Rp @ child.p
    rpy = matrix_to_rpy(Rp @ child.R, fallback=True)
    return Pose(tuple(pos), rpy, parent.frame, child.name)


def invert(pose: Pose) -> Pose:
    Rt = pose.R.T
    pos = -Rt @ pose.p
    return Pose(tuple(pos), matrix_to_rpy(Rt, fallback=True), pose.name, pose.frame)


def poses_close(a: Pose, b: Pose, tol: float = 1e-9) -> bool:
    """Compare positions and rotation matrices (rpy is not unique at gimbal lock)."""
    return bool(
        np.max(np.abs(a.p - b.p)) <= tol and np.max(np.abs(a.R - b.R)) <= tol
    )


@dataclass(frozen=True)
class BBox:
    dx: float
    dy: float
    dz: float

    def __post_init__(self):
        for v in (self.dx, self.dy, self.dz):
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"bounding box sizes must be positive, got {v}")

    @property
    def half(self) -> np.ndarray:
        return np.array([self.dx, self.dy, self.dz]) / 2.0

    def as_tuple(self) -> Vec3:
        return (self.dx, self.dy, self.dz)


class Kind(str, Enum):
    SOLID = "solid"
    SPACE = "space"
    AIR = "air"
    HAND = "hand"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class PhysicalObject:
    id: str
    pose: Pose
    size: BBox
    kind: Kind = Kind.SOLID
    # spaces only: False marks a clearance region that never holds objects
    container: bool = True
    # solids only: False for fixed supports (plates, table parts, appliances)
    movable: bool = True

    def moved(self, pose: Pose) -> "PhysicalObject":
        return PhysicalObject(self.id, pose, self.size, self.kind, self.container, self.movable)


def obb_contains_point(box_pose: Pose, size: BBox, point: Sequence[float],
                       eps: float = CONTAIN_EPS) -> bool:
    """Closed containment test of ``point`` in the oriented box."""
    local = box_pose.R.T @ (np.asarray(point, dtype=float) - box_pose.p)
    return bool(np.all(np.abs(local) <= size.half + eps))


def obb_overlap(a: Tuple[Pose, BBox], b: Tuple[Pose, BBox], margin: float = 0.0) -> bool:
    """Separating-axis test over the 15 candidate axes.

    Boxes count as overlapping unless some axis separates them by more than
    ``-margin``; a positive margin lets touching faces pass as disjoint.
    """
    (pa, sa), (pb, sb) = a, b
    Ra, Rb = pa.R, pb.R
    ha, hb = sa.half, sb.half
    t = pb.p - pa.p
    axes = [Ra[:, i] for i in range(3)] + [Rb[:, i] for i in range(3)]
    for i in range(3):
        for j in range(3):
            c = np.cross(Ra[:, i], Rb[:, j])
            n = np.linalg.norm(c)
            if n > 1e-12:
                axes.append(c / n)
    for L in axes:
        ra = float(np.sum(ha * np.abs(Ra.T @ L)))
        rb = float(np.sum(hb * np.abs(Rb.T @ L)))
        if abs(float(t @ L)) > ra + rb - margin:
            return False
    return True
