"""Benchmark scenarios and the perceive -> plan -> simulate harness.

Two block-world scenes are built here.  ``task1`` rearranges green blocks
between container spaces laid out on a grid; ``task2`` cleans, cooks and
serves two cabbages while moving turnips and glasses out of the way.

Every container space is flanked by non-container *clearance* spaces, which
stand for the room the fingers need around a block.
"""

from __future__ import annotations

import hashlib
import json
import logging
import statistics
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .executor import decompose, simulate
from .geom import BBox, Kind, PhysicalObject, Pose
from .perception import Scene, generate_table_parts, make_problem
from .planner import PlannerConfig, ResourceLimit, Unsolvable, plan
from .symbolic import (
    CONTAINER, HYBRID, Atom, GroundTask, builtin_domain, ground, validate,
    well_formed_violations,
)

log = logging.getLogger(__name__)

CUBE = BBox(0.05, 0.05, 0.05)
SLAB = BBox(0.08, 0.08, 0.03)
PITCH = 0.05
TABLE_TOP = 0.4
ROBOT_BASE = Pose((1.5, 0.0, 0.45))
HAND_HOME = Pose((1.0, 0.0, 0.8), (0.0, 0.0, 0.0))
FRONT_GRASP = (("front", "left", "right"),)
UPRIGHT = (("under", "on"),)

# reported reference figures, shown next to our own numbers
REFERENCE = {
    "task1": {"length": 46, "seconds": 0.31},
    "task2": {"length": 57, "seconds": 0.94},
}
BASELINE = {
    "task1": {"seconds": 135.0, "success_rate": 0.72},
    "task2": {"seconds": 44.0, "success_rate": 0.76},
}


@dataclass(frozen=True)
class Bounds:
    max_length: int
    max_seconds: float
    reference_length: int
    reference_seconds: float

    def __post_init__(self):
        if min(self.max_length, self.max_seconds, self.reference_length, self.reference_seconds) <= 0:
            raise ValueError("scenario bounds must be positive")


@dataclass(frozen=True)
class Scenario:
    name: str
    scene: Scene
    domain_kind: str
    grasp_whitelist: Tuple[Tuple[str, str, str], ...]
    goal: Tuple[Atom, ...]
    extensions: Tuple[str, ...] = ()
    facts: Tuple[Atom, ...] = ()
    bounds: Optional[Bounds] = None
    placement_whitelist: Optional[Tuple[Tuple[str, str], ...]] = None

    def domain(self):
        return builtin_domain(self.domain_kind, self.grasp_whitelist, self.extensions,
                              self.placement_whitelist)

    def problem(self):
        dom, statics = self.domain()
        return dom, make_problem(self.scene, self.goal, dom.name, statics, self.facts, self.name)

    def planning(self) -> dict:
        """The scene-file ``planning`` block that rebuilds this scenario."""
        d = {"domain": self.domain_kind, "extensions": list(self.extensions),
             "facts": [list(f) for f in self.facts], "goal": [list(g) for g in self.goal]}
        if self.grasp_whitelist is not None:
            d["grasps"] = [list(g) for g in self.grasp_whitelist]
        if self.placement_whitelist is not None:
            d["placements"] = [list(p) for p in self.placement_whitelist]
        return d

    def task(self) -> GroundTask:
        dom, prob = self.problem()
        return ground(dom, prob)


def _cube(oid, x, y, z=TABLE_TOP + CUBE.dz / 2):
    return PhysicalObject(oid, Pose((x, y, z)), CUBE, Kind.SOLID)


def _space(oid, x, y, container=True):
    return PhysicalObject(oid, Pose((x, y, TABLE_TOP + CUBE.dz / 2)), CUBE, Kind.SPACE,
                          container=container)


def _slab(oid, x, y):
    return PhysicalObject(oid, Pose((x, y, TABLE_TOP - SLAB.dz / 2)), SLAB, Kind.SOLID,
                          movable=False)


def _table(x, y, dx, dy):
    return PhysicalObject("table", Pose((x, y, TABLE_TOP / 2)), BBox(dx, dy, TABLE_TOP),
                          Kind.FIXTURE, movable=False)


def _hand():
    return PhysicalObject("hand", HAND_HOME, BBox(0.04, 0.07, 0.085), Kind.HAND)


def _grid(columns: Sequence[Sequence[Optional[str]]], x_front: float, y0: float):
    """Container spaces from ``columns`` (front row first), clearance elsewhere.

    Each column is a list of space ids per row behind the front clearance row;
    ``None`` marks a clearance cell.  Every column is padded to the deepest one.
    """
    depth = max(len(c) for c in columns)
    spaces = []
    for j, col in enumerate(columns):
        y = y0 + j * PITCH
        spaces.append(_space(f"free-0-{j}", x_front, y, container=False))
        for r in range(depth):
            x = x_front - (r + 1) * PITCH
            sid = col[r] if r < len(col) else None
            if sid is None:
                spaces.append(_space(f"free-{r + 1}-{j}", x, y, container=False))
            else:
                spaces.append(_space(sid, x, y))
    return spaces


def _with_clearance(cols):
    out = [[None]]
    for c in cols:
        out.append(c)
        out.append([None])
    return out


def scenario_task1() -> Scenario:
    """Green blocks behind blue blocks move to the spots behind the cyan blocks."""
    blue = [["sblue1", "sgreen1"], ["sblue2", "sgreen2"], ["sblue3", "sgreen3"], ["sblue4"]]
    buffers = [["stable1"], ["stable2"]]
    cyan = [["scyan1", "sgreeng1"], ["scyan2", "sgreeng2"], ["scyan3", "sgreeng3"], ["scyan4"]]
    spaces = _grid(_with_clearance(blue + buffers + cyan), x_front=0.75, y0=-0.5)
    where = {s.id: s.pose.position for s in spaces}
    blocks = []
    for i in range(1, 5):
        blocks.append(_cube(f"bblue{i}", *where[f"sblue{i}"][:2]))
        blocks.append(_cube(f"bcyan{i}", *where[f"scyan{i}"][:2]))
    for k in range(1, 4):
        blocks.append(_cube(f"bgreen{k}", *where[f"sgreen{k}"][:2]))
    scene = Scene(tuple(blocks) + (_table(0.55, 0.0, 0.6, 1.2),), tuple(spaces),
                  robot_base=ROBOT_BASE, hand=_hand())
    goal = tuple(("oc", "in", f"sgreeng{k}", f"bgreen{k}") for k in range(1, 4))
    goal += tuple(("oc", "in", f"sblue{i}", f"bblue{i}") for i in range(1, 5))
    goal += tuple(("oc", "in", f"scyan{i}", f"bcyan{i}") for i in range(1, 5))
    return Scenario("task1", scene, CONTAINER, FRONT_GRASP, goal,
                    bounds=Bounds(60, 10.0, REFERENCE["task1"]["length"], REFERENCE["task1"]["seconds"]))


def scenario_task2() -> Scenario:
    """Clean, cook and serve two cabbages; wash three glasses and set out two."""
    # a cabbage sits behind one turnip; grasp guards only see the adjacent space,
    # so deeper stacks of blockers would let the hand sweep through a block
    cols = [["sturnip1", "scabbage1"], ["sturnip2", "scabbage2"], ["sturnip3"], ["sturnip4"]]
    spaces = _grid(_with_clearance(cols), x_front=0.75, y0=-0.55)
    where = {s.id: s.pose.position for s in spaces}
    objs = [_cube(f"bturnip{j}", *where[f"sturnip{j}"][:2]) for j in range(1, 5)]
    objs += [_cube(f"bcabbage{i}", *where[f"scabbage{i}"][:2]) for i in range(1, 3)]
    slabs = ["dishw", "microw", "plate1", "plate2", "table-glass1", "table-glass2"]
    ys = [-0.05 + 0.12 * i for i in range(len(slabs))]
    objs += [_slab(n, 0.65, y) for n, y in zip(slabs, ys)]
    objs += [_cube(f"bglass{g}", 0.45, ys[g - 1] + 0.06) for g in range(1, 4)]
    table = _table(0.55, 0.0, 0.6, 1.2)
    scene = Scene(tuple(objs) + (table,), tuple(spaces), robot_base=ROBOT_BASE, hand=_hand())
    parts = generate_table_parts(scene, 0, prefix="table")
    scene = Scene(scene.objects + tuple(parts), scene.spaces, robot_base=ROBOT_BASE, hand=_hand())
    goal = [("cooked", f"bcabbage{i}") for i in (1, 2)]
    goal += [("oc", "on", f"plate{i}", f"bcabbage{i}") for i in (1, 2)]
    goal += [("oc", "in", f"sturnip{j}", f"bturnip{j}") for j in range(1, 5)]
    goal += [("cleaned", f"bglass{g}") for g in (1, 2, 3)]
    goal += [("oc", "on", f"table-glass{g}", f"bglass{g}") for g in (1, 2)]
    facts = (("cleaner", "dishw"), ("cooker", "microw"))
    return Scenario("task2", scene, HYBRID, FRONT_GRASP, tuple(goal), ("clean", "cook"), facts,
                    Bounds(75, 10.0, REFERENCE["task2"]["length"], REFERENCE["task2"]["seconds"]),
                    placement_whitelist=UPRIGHT)


SCENARIOS = {"task1": scenario_task1, "task2": scenario_task2}


@dataclass
class BenchRow:
    name: str
    success: bool = False
    length: Optional[int] = None
    seconds: Optional[float] = None          # median of grounding + search
    ground_seconds: Optional[float] = None
    search_seconds: Optional[float] = None
    expansions: Optional[int] = None
    actions: Optional[int] = None
    collisions: int = 0
    within_bounds: Optional[bool] = None
    error: Optional[str] = None
    plan: List[str] = field(default_factory=list)
    trace_digest: Optional[str] = None       # sha256 of the simulation trace

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["reference"] = REFERENCE.get(self.name)
        d["baseline"] = BASELINE.get(self.name)
        return d


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)
    repetitions: int = 1

    @property
    def all_passed(self) -> bool:
        return all(r.success and r.within_bounds is not False for r in self.rows)

    def to_dict(self) -> dict:
        return {"repetitions": self.repetitions, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def table(self) -> str:
        head = ("scenario", "ok", "len", "ref len", "time s", "ref s", "baseline s", "baseline rate")
        lines = [head]

        def f(v, spec):
            return "-" if v is None else format(v, spec)

        for r in self.rows:
            ref = REFERENCE.get(r.name, {})
            base = BASELINE.get(r.name, {})
            lines.append((r.name, "yes" if r.success else "NO", f(r.length, "d"),
                          f(ref.get("length"), "d"), f(r.seconds, ".3f"),
                          f(ref.get("seconds"), ".2f"), f(base.get("seconds"), ".1f"),
                          f(base.get("success_rate"), ".2f")))
        widths = [max(len(l[i]) for l in lines) for i in range(len(head))]
        out = ["  ".join(c.ljust(w) for c, w in zip(l, widths)).rstrip() for l in lines]
        out.insert(1, "  ".join("-" * w for w in widths))
        for r in self.rows:
            if r.error:
                out.append(f"{r.name}: {r.error}")
        return "\n".join(out) + "\n"


def run_scenario(sc: Scenario, cfg: PlannerConfig = PlannerConfig(), repetitions: int = 1) -> BenchRow:
    """Perceive, ground, plan, validate, decompose and simulate one scenario.

    Failures are recorded on the row, never raised.
    """
    row = BenchRow(sc.name)
    grounds, searches = [], []
    result = task = None
    try:
        for _ in range(max(1, repetitions)):
            t0 = time.perf_counter()
            task = sc.task()
            t1 = time.perf_counter()
            result = plan(task, cfg)
            t2 = time.perf_counter()
            grounds.append(t1 - t0)
            searches.append(t2 - t1)
    except (Unsolvable, ResourceLimit) as e:
        row.error = f"planning failed: {type(e).__name__}: {e}"
        return row
    except ValueError as e:
        row.error = f"setup failed: {e}"
        return row
    row.ground_seconds = statistics.median(grounds)
    row.search_seconds = statistics.median(searches)
    row.seconds = statistics.median(g + s for g, s in zip(grounds, searches))
    row.actions = len(task.actions)
    row.length = len(result.plan)
    row.expansions = result.stats.expansions
    row.plan = [str(a) for a in result.plan]

    check = validate(result.plan, task.init | task.statics, task.goal)
    if not check:
        row.error = f"plan does not validate: {check}"
        return row
    bad = well_formed_violations(check.final_state)
    if bad:
        row.error = "final state malformed: " + "; ".join(bad)
        return row
    try:
        report = simulate(decompose(result.plan, sc.scene), sc.scene, sc.goal)
    except ValueError as e:
        row.error = f"decomposition failed: {e}"
        return row
    row.collisions = len(report.collisions)
    row.trace_digest = hashlib.sha256(json.dumps(report.trace, sort_keys=True).encode()).hexdigest()
    row.success = report.success
    if not report.success:
        row.error = report.error or (f"goal atoms missing: {len(report.missing)}" if report.missing
                                     else f"{row.collisions} collisions")
    if sc.bounds is not None:
        row.within_bounds = row.length <= sc.bounds.max_length and row.seconds <= sc.bounds.max_seconds
    log.info("%s: length=%s seconds=%.3f success=%s", sc.name, row.length, row.seconds, row.success)
    return row


def run_bench(scenarios: Sequence[Scenario] = (), cfg: PlannerConfig = PlannerConfig(),
              repetitions: int = 1) -> BenchReport:
    return BenchReport([run_scenario(sc, cfg, repetitions) for sc in scenarios], max(1, repetitions))
