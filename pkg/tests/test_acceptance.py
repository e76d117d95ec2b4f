"""The ten acceptance criteria; each records a PASS/FAIL line for the summary."""

import time

import numpy as np
import pytest

from constructions import grasped_scene, occupied, placed_scene
from oracles import angles_equal, chain, random_rpy, rot
from reference_rows import CENTROID_ROWS, GRASP_ROWS, PLACEMENT_ROWS, SPACE_ROWS
from worlds import micro_worlds, task_for
from utamp.abstraction import (
    GraspConfig, PlacementConfig, enumerate_legal_grasps, enumerate_surface_placements,
    grasp_hand_pose, hand_world_pose, object_world_from_support, part_centroid, placement_pose,
)
from utamp.bench import SCENARIOS, run_bench
from utamp.geom import BBox, PhysicalObject, Pose, matrix_to_rpy, rpy_to_matrix
from utamp.pddl import parse_domain, parse_problem, write_domain, write_problem
from utamp.perception import associated_space, perceive
from utamp.planner import Unsolvable, breadth_first_search, plan
from utamp.symbolic import validate

RESULTS = {}


def record(n, title, ok, detail=""):
    RESULTS[n] = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f": {detail}" if detail else "")
    assert ok, RESULTS[n]


def test_01_pose_round_trip():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst_angle = worst_ortho = 0.0
    for _ in range(1000):
        w = random_rpy(rng)
        R = rpy_to_matrix(w)
        back = matrix_to_rpy(R)
        worst_angle = max(worst_angle, max(abs((a - b + np.pi) % (2 * np.pi) - np.pi) for a, b in zip(back, w)))
        worst_ortho = max(worst_ortho, float(np.max(np.abs(R.T @ R - np.eye(3)))))
    dt = time.perf_counter() - t0
    ok = worst_angle < 1e-9 and worst_ortho < 1e-9 and dt < 1.0
    record(1, "rpy round trip on 1000 orientations", ok,
           f"max angle error {worst_angle:.1e}, max orthonormality error {worst_ortho:.1e}, {dt:.2f} s")


def test_02_reference_rows():
    d, d1, d2 = (0.1, 0.3, 0.2), (0.1, 0.2, 0.3), (1.0, 2.0, 3.0)
    failed = []
    for part, f in CENTROID_ROWS.items():
        if tuple(part_centroid(part, d)) != f(*d):
            failed.append(f"centroid {part}")
    for row, (cfg, rpy) in sorted(GRASP_ROWS.items()):
        got = grasp_hand_pose(GraspConfig(*cfg), d)
        if not (np.allclose(got.position, part_centroid(cfg[0], d)) and angles_equal(got.rpy, rpy)):
            failed.append(f"grasp row {row} {cfg}: got rpy/pi {tuple(round(x / np.pi, 3) + 0.0 for x in got.rpy)}")
    for row, (cfg, pos, rpy) in sorted(PLACEMENT_ROWS.items()):
        got = placement_pose(PlacementConfig(*cfg), d1, d2)
        if not (np.allclose(got.position, pos(d1, d2), atol=1e-12) and angles_equal(got.rpy, rpy)):
            failed.append(f"placement row {row}")
    for part, f in SPACE_ROWS.items():
        sp = associated_space(PhysicalObject("o", Pose(), BBox(*d)), part)
        if not np.allclose(sp.pose.position, f(*d)):
            failed.append(f"space {part}")
    record(2, "centroid, grasp, placement and space reference rows", not failed,
           "; ".join(failed) or "21 rows match")


def test_03_counts():
    g, p = len(enumerate_legal_grasps()), len(enumerate_surface_placements())
    record(3, "grasp and placement counts", (g, p) == (24, 36), f"{g} grasps, {p} surface placements")


def test_04_kinematic_chain():
    rng = np.random.default_rng(4)
    grasps, places = enumerate_legal_grasps(), enumerate_surface_placements()
    worst = 0.0
    for _ in range(200):
        support = Pose(tuple(rng.uniform(-1, 1, 3)), random_rpy(rng))
        c, g = places[rng.integers(36)], grasps[rng.integers(24)]
        s1, s2 = tuple(rng.uniform(0.02, 0.3, 3)), tuple(rng.uniform(0.02, 0.5, 3))
        rel, hand = placement_pose(c, s1, s2), grasp_hand_pose(g, s1)
        got = hand_world_pose(object_world_from_support(support, rel), hand).matrix()
        want = chain((support.position, support.rpy), (rel.position, rel.rpy), (hand.position, hand.rpy))
        worst = max(worst, float(np.max(np.abs(got - want))))
    record(4, "hand world pose vs 4x4 chain on 200 triples", worst < 1e-9, f"max error {worst:.1e}")


def test_05_planner_matches_bfs():
    t0 = time.perf_counter()
    n = solvable = 0
    bad = []
    for label, world in micro_worlds():
        task = task_for(world)
        n += 1
        ref = breadth_first_search(task, max_states=100_000)
        try:
            got = plan(task).plan
        except Unsolvable:
            got = None
        if (ref is None) != (got is None):
            bad.append(label)
        elif got is not None:
            solvable += 1
            if not validate(got, task.init | task.statics, task.goal):
                bad.append(label + " (invalid plan)")
    dt = time.perf_counter() - t0
    record(5, "planner vs exhaustive search on micro-worlds", not bad and dt < 60,
           f"{n} worlds, {solvable} solvable, {len(bad)} disagreements, {dt:.1f} s")


@pytest.fixture(scope="module")
def runs():
    scenarios = [f() for f in SCENARIOS.values()]
    return run_bench(scenarios), run_bench(scenarios)


def _task_check(runs, n, name, bound):
    sc = SCENARIOS[name]()
    r = next(r for r in runs[0].rows if r.name == name)
    ok = r.success and r.length is not None and r.length <= bound and r.seconds <= 10.0 and r.collisions == 0
    record(n, f"{name} end to end", ok,
           f"{r.length} actions (bound {bound}), {r.seconds:.2f} s planning, "
           f"{r.collisions} collisions, simulation {'reached' if r.success else 'missed'} "
           f"{len(sc.goal)} goal atoms" + (f", {r.error}" if r.error else ""))


def test_06_task1(runs):
    _task_check(runs, 6, "task1", 60)


def test_07_task2(runs):
    sc = SCENARIOS["task2"]()
    # the goal covers status atoms and turnip restoration
    assert any(g[0] == "cooked" for g in sc.goal) and any(g[0] == "cleaned" for g in sc.goal)
    assert any(g[2].startswith("sturnip") for g in sc.goal if g[0] == "oc")
    _task_check(runs, 7, "task2", 75)


def test_08_perception_inversion():
    rng = np.random.default_rng(8)
    wrong = 0
    for i in range(500):
        scene, expected = (placed_scene if i % 2 == 0 else grasped_scene)(rng)
        if occupied(perceive(scene)) != expected:
            wrong += 1
    record(8, "perception recovers 500 constructed configurations", wrong == 0, f"{wrong} mismatches")


def test_09_determinism(runs):
    a, b = runs
    same = [(x.plan, x.expansions, x.trace_digest) == (y.plan, y.expansions, y.trace_digest)
            for x, y in zip(a.rows, b.rows)]
    record(9, "two bench runs agree", all(same) and len(a.rows) == len(b.rows) == 2,
           ", ".join(f"{x.name} {'identical' if s else 'differs'}" for x, s in zip(a.rows, same)))


def test_10_pddl_round_trip():
    bad = []
    for name, f in sorted(SCENARIOS.items()):
        dom, prob = f().problem()
        d, p = write_domain(dom), write_problem(prob)
        if write_domain(parse_domain(d)) != d:
            bad.append(f"{name} domain")
        if write_problem(parse_problem(p)) != p:
            bad.append(f"{name} problem")
    record(10, "PDDL export-parse-export byte identical", not bad, ", ".join(bad) or "4 files identical")
