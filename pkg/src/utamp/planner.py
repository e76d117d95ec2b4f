"""Lazy greedy best-first search with preferred operators.

States are frozensets of integer fact ids.  The heuristic is the size of a
relaxed plan extracted from additive-cost best supporters (FF style), or the
additive cost itself.  Preferred operators are the applicable actions of the
relaxed plan; they go into a second open list that gets a priority boost
whenever the search makes heuristic progress.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .symbolic import GroundAction, GroundTask, State, apply

log = logging.getLogger(__name__)

INF = math.inf


class Unsolvable(Exception):
    """Search space exhausted without reaching the goal."""


class ResourceLimit(Exception):
    """Expansion or wall-clock limit hit."""


@dataclass(frozen=True)
class PlannerConfig:
    heuristic: str = "ff"            # "ff" or "add"
    use_preferred: bool = True
    boost: int = 1000
    max_expansions: int = 1_000_000
    time_limit: float = 60.0

    def __post_init__(self):
        if self.heuristic not in ("ff", "add", "blind"):
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.max_expansions <= 0 or self.time_limit <= 0 or self.boost < 0:
            raise ValueError("planner limits must be positive")


@dataclass
class SearchStats:
    expansions: int = 0
    evaluations: int = 0
    generated: int = 0
    seconds: float = 0.0
    initial_h: float = 0.0


@dataclass
class PlanResult:
    plan: List[GroundAction]
    stats: SearchStats

    def __len__(self):
        return len(self.plan)


class CompiledTask:
    """Integer encoding of a ground task for fast search."""

    def __init__(self, task: GroundTask):
        self.task = task
        facts = set(task.init) | set(task.goal)
        for a in task.actions:
            facts |= a.pre | a.add | a.delete
        self.facts = sorted(facts)
        self.fid = {f: i for i, f in enumerate(self.facts)}
        self.actions = task.actions
        self.pre = [tuple(sorted(self.fid[f] for f in a.pre)) for a in task.actions]
        self.add = [tuple(sorted(self.fid[f] for f in a.add)) for a in task.actions]
        self.dele = [frozenset(self.fid[f] for f in a.delete) for a in task.actions]
        self.addset = [frozenset(x) for x in self.add]
        self.preset = [frozenset(x) for x in self.pre]
        self.init = frozenset(self.fid[f] for f in task.init)
        self.goal = tuple(sorted(self.fid[f] for f in task.goal))
        self.goalset = frozenset(self.goal)
        self.pre_of: Dict[int, List[int]] = defaultdict(list)
        self.no_pre: List[int] = []
        # successor generator keyed on each action's first precondition fact
        self.by_first: Dict[int, List[int]] = defaultdict(list)
        for i, pre in enumerate(self.pre):
            for f in pre:
                self.pre_of[f].append(i)
            if pre:
                self.by_first[pre[0]].append(i)
            else:
                self.no_pre.append(i)

    def applicable(self, state: FrozenSet[int]) -> List[int]:
        out = list(self.no_pre)
        for f in state:
            for i in self.by_first.get(f, ()):
                if self.preset[i] <= state:
                    out.append(i)
        out.sort()
        return out

    def successor(self, state: FrozenSet[int], i: int) -> FrozenSet[int]:
        return (state - self.dele[i]) | self.addset[i]

    def decode(self, state: FrozenSet[int]) -> State:
        return frozenset(self.facts[f] for f in state)


def relaxed_exploration(ct: CompiledTask, state: FrozenSet[int]):
    """Additive costs and best supporters under the delete relaxation."""
    cost: Dict[int, float] = {f: 0.0 for f in state}
    supporter: Dict[int, int] = {}
    remaining = [len(p) for p in ct.pre]
    act_cost = [0.0] * len(ct.pre)
    heap = [(0.0, f) for f in sorted(state)]
    heapq.heapify(heap)
    goal_left = set(ct.goal) - state
    done: Set[int] = set()

    def fire(i, c):
        for g in ct.add[i]:
            old = cost.get(g, INF)
            if c < old or (c == old and g in supporter and i < supporter[g]):
                if c < old:
                    heapq.heappush(heap, (c, g))
                cost[g] = c
                supporter[g] = i

    for i in ct.no_pre:
        fire(i, 1.0)
    while heap and goal_left:
        c, f = heapq.heappop(heap)
        if f in done or c > cost.get(f, INF):
            continue
        done.add(f)
        goal_left.discard(f)
        for i in ct.pre_of.get(f, ()):
            remaining[i] -= 1
            act_cost[i] += c
            if remaining[i] == 0:
                fire(i, act_cost[i] + 1.0)
    return cost, supporter


def relaxed_plan_heuristic(ct: CompiledTask, state: FrozenSet[int], kind: str = "ff"):
    """Return ``(h, preferred action indices)`` for ``state``."""
    if ct.goalset <= state:
        return 0, []
    if kind == "blind":
        return 1, []
    cost, supporter = relaxed_exploration(ct, state)
    if any(g not in cost for g in ct.goal):
        return INF, []
    relaxed: Set[int] = set()
    stack = [g for g in ct.goal if g not in state]
    seen: Set[int] = set()
    while stack:
        f = stack.pop()
        if f in seen or f in state:
            continue
        seen.add(f)
        a = supporter[f]
        if a not in relaxed:
            relaxed.add(a)
            stack.extend(ct.pre[a])
    preferred = sorted(a for a in relaxed if ct.preset[a] <= state)
    if kind == "add":
        h = sum(cost[g] for g in ct.goal)
        return int(h), preferred
    return len(relaxed), preferred


@dataclass
class _Node:
    state: FrozenSet[int]
    parent: Optional["_Node"]
    action: Optional[int]

    def path(self) -> List[int]:
        out = []
        n = self
        while n.parent is not None:
            out.append(n.action)
            n = n.parent
        return out[::-1]


def plan(task: GroundTask, cfg: PlannerConfig = PlannerConfig(),
         compiled: Optional[CompiledTask] = None) -> PlanResult:
    """Search for a plan; raises :class:`Unsolvable` or :class:`ResourceLimit`."""
    t0 = time.perf_counter()
    ct = compiled or CompiledTask(task)
    stats = SearchStats()
    counter = itertools.count()

    root = _Node(ct.init, None, None)
    # entries: (h_parent, insertion index, parent node, action index)
    regular: List[tuple] = []
    preferred: List[tuple] = []
    priorities = [0, 0]       # [preferred, regular]; lower is served first
    closed: Set[FrozenSet[int]] = set()
    best_h = INF

    def finish(node):
        stats.seconds = time.perf_counter() - t0
        return PlanResult([ct.actions[i] for i in node.path()], stats)

    def expand(node: _Node, h: float, pref: List[int]):
        nonlocal best_h
        if h < best_h:
            if best_h != INF and cfg.use_preferred:
                priorities[0] -= cfg.boost
            best_h = h
        pset = set(pref)
        for i in ct.applicable(node.state):
            stats.generated += 1
            entry = (h, next(counter), node, i)
            heapq.heappush(regular, entry)
            if cfg.use_preferred and i in pset:
                heapq.heappush(preferred, entry)

    def evaluate(node):
        stats.evaluations += 1
        return relaxed_plan_heuristic(ct, node.state, cfg.heuristic)

    h0, pref0 = evaluate(root)
    stats.initial_h = h0
    if ct.goalset <= root.state:
        return finish(root)
    if h0 == INF:
        stats.seconds = time.perf_counter() - t0
        raise Unsolvable("goal unreachable under the delete relaxation")
    closed.add(root.state)
    stats.expansions += 1
    expand(root, h0, pref0)

    while regular or preferred:
        if stats.expansions >= cfg.max_expansions:
            raise ResourceLimit(f"expansion limit {cfg.max_expansions} reached")
        if time.perf_counter() - t0 > cfg.time_limit:
            raise ResourceLimit(f"time limit {cfg.time_limit}s reached")
        use_pref = bool(preferred) and (priorities[0] <= priorities[1] or not regular)
        queue = preferred if use_pref else regular
        priorities[0 if use_pref else 1] += 1
        _, _, parent, i = heapq.heappop(queue)
        state = ct.successor(parent.state, i)
        if state in closed:
            continue
        closed.add(state)
        node = _Node(state, parent, i)
        if ct.goalset <= state:
            return finish(node)
        h, pref = evaluate(node)
        if h == INF:
            continue
        stats.expansions += 1
        expand(node, h, pref)

    stats.seconds = time.perf_counter() - t0
    raise Unsolvable("search space exhausted")


def breadth_first_search(task: GroundTask, max_states: int = 100_000) -> Optional[List[GroundAction]]:
    """Exhaustive BFS over symbolic states via :func:`symbolic.apply`.

    Returns a shortest plan, or None when the goal is unreachable.  Kept
    independent of the compiled encoding so it can serve as a reference.
    """
    start = task.init
    if task.goal <= start:
        return []
    parents = {start: None}
    frontier = deque([start])
    while frontier:
        s = frontier.popleft()
        for a in task.actions:
            if not a.pre <= s:
                continue
            t = apply(s, a)
            if t in parents:
                continue
            parents[t] = (s, a)
            if task.goal <= t:
                out = []
                while parents[t] is not None:
                    t, a2 = parents[t]
                    out.append(a2)
                return out[::-1]
            if len(parents) > max_states:
                raise ResourceLimit(f"more than {max_states} states")
            frontier.append(t)
    return None
