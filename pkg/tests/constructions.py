"""Scenes built from abstract configurations, with the oc atoms they should produce."""

import numpy as np

from oracles import random_rpy
from utamp.abstraction import (
    enumerate_legal_grasps, enumerate_surface_placements, grasp_hand_pose, hand_world_pose,
    object_world_from_support, placement_pose,
)
from utamp.geom import BBox, Kind, PhysicalObject, Pose
from utamp.perception import Scene

GRASPS = enumerate_legal_grasps()
PLACEMENTS = enumerate_surface_placements()


def _size(rng):
    # contact-axis extents within a factor of two keep each centroid inside
    # the other's associated space
    return BBox(*rng.uniform(0.04, 0.07, 3))


def placed_scene(rng):
    """``o1`` resting on ``o2`` through a random surface placement."""
    cfg = PLACEMENTS[rng.integers(len(PLACEMENTS))]
    s1, s2 = _size(rng), _size(rng)
    support = Pose(tuple(rng.uniform(-1, 1, 3)), random_rpy(rng))
    o1_pose = object_world_from_support(support, placement_pose(cfg, s1, s2))
    scene = Scene((PhysicalObject("o2", support, s2), PhysicalObject("o1", o1_pose, s1)))
    expected = {("oc", cfg.placed, "o1", "o2"), ("oc", cfg.support, "o2", "o1")}
    return scene, expected


def grasped_scene(rng):
    """``o1`` held by the hand through a random legal grasp."""
    g = GRASPS[rng.integers(len(GRASPS))]
    s1 = _size(rng)
    o1_pose = Pose(tuple(rng.uniform(-1, 1, 3)), random_rpy(rng))
    hand_pose = hand_world_pose(o1_pose, grasp_hand_pose(g, s1))
    hand = PhysicalObject("hand", hand_pose, BBox(0.04, 0.07, 0.085), Kind.HAND)
    scene = Scene((PhysicalObject("o1", o1_pose, s1),), hand=hand, holding="o1")
    expected = {("oc", p, "o1", "hand") for p in g} | {("oc", "in", "hand", "o1")}
    return scene, expected


def occupied(atoms):
    """oc atoms whose occupant is not air."""
    return {a for a in atoms if a[0] == "oc" and a[3] != "air"}
