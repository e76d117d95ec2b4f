"""Independent reference computations, written without utamp's own math."""

import math

import numpy as np
from scipy.spatial.transform import Rotation

# outward unit normal of each box side, written out by hand
NORMAL = {
    "on": (0, 0, 1), "under": (0, 0, -1),
    "left": (0, 1, 0), "right": (0, -1, 0),
    "front": (1, 0, 0), "back": (-1, 0, 0),
}


def rot(rpy):
    roll, pitch, yaw = rpy
    return Rotation.from_euler("ZYX", [yaw, pitch, roll]).as_matrix()


def homogeneous(position, rpy):
    T = np.eye(4)
    T[:3, :3] = rot(rpy)
    T[:3, 3] = position
    return T


def chain(*frames):
    """Product of 4x4 transforms for ``(position, rpy)`` pairs, left to right."""
    T = np.eye(4)
    for p, w in frames:
        T = T @ homogeneous(p, w)
    return T


def centroid(part, size):
    if part == "in":
        return np.zeros(3)
    return np.array(NORMAL[part], dtype=float) * np.asarray(size, dtype=float) / 2


def random_rpy(rng, margin=1e-3):
    """Uniform angles, pitch kept away from +-pi/2."""
    roll = rng.uniform(-math.pi, math.pi)
    yaw = rng.uniform(-math.pi, math.pi)
    pitch = rng.uniform(-math.pi / 2 + margin, math.pi / 2 - margin)
    return (roll, pitch, yaw)


def angles_equal(a, b, tol=1e-9):
    """Componentwise equality modulo 2*pi (+pi and -pi identified)."""
    return all(abs((x - y + math.pi) % (2 * math.pi) - math.pi) <= tol for x, y in zip(a, b))
