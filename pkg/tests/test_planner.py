import itertools
import math

import pytest

from worlds import container_world, micro_worlds, support_world, task_for
from utamp.planner import (
    CompiledTask, PlannerConfig, ResourceLimit, Unsolvable, breadth_first_search, plan,
    relaxed_plan_heuristic,
)
from utamp.symbolic import apply, validate

INF = math.inf


def relaxed_costs(task, state):
    """Additive and max costs of the goal by plain value iteration."""
    add = {f: 0 for f in state}
    mx = {f: 0 for f in state}
    changed = True
    while changed:
        changed = False
        for a in task.actions:
            if not all(f in add for f in a.pre):
                continue
            ca = 1 + sum(add[f] for f in a.pre)
            cm = 1 + max((mx[f] for f in a.pre), default=0)
            for f in a.add:
                if ca < add.get(f, INF):
                    add[f] = ca
                    changed = True
                if cm < mx.get(f, INF):
                    mx[f] = cm
                    changed = True
    if not all(g in add for g in task.goal):
        return INF, INF
    return sum(add[g] for g in task.goal if g not in state), max((mx[g] for g in task.goal), default=0)


def sample_states(task, n=25):
    out, frontier = [task.init], [task.init]
    while frontier and len(out) < n:
        s = frontier.pop(0)
        for a in task.actions:
            if a.pre <= s:
                t = apply(s, a)
                if t not in out:
                    out.append(t)
                    frontier.append(t)
    return out


WORLDS = [
    support_world(3, {0: ["b1", "b2"]}, (("oc", "on", "t2", "b1"), ("oc", "on", "b1", "b2"))),
    container_world(3, {0: "b1", 1: "b2"}, (("oc", "in", "s1", "b1"), ("oc", "in", "s0", "b2"))),
]


@pytest.mark.parametrize("world", WORLDS, ids=["support", "container"])
def test_heuristics_match_value_iteration(world):
    task = task_for(world)
    ct = CompiledTask(task)
    for s in sample_states(task):
        h_add, h_max = relaxed_costs(task, s)
        enc = frozenset(ct.fid[f] for f in s)
        got_add, _ = relaxed_plan_heuristic(ct, enc, "add")
        got_ff, pref = relaxed_plan_heuristic(ct, enc, "ff")
        assert got_add == h_add
        assert h_max <= got_ff <= h_add
        assert all(task.actions[i].pre <= s for i in pref)
        if task.goal <= s:
            assert got_ff == 0


def test_relaxed_dead_end_is_infinite():
    # no container action stacks blocks
    task = task_for(container_world(2, {0: "b1", 1: "b2"}, (("oc", "on", "b1", "b2"),)))
    ct = CompiledTask(task)
    h, _ = relaxed_plan_heuristic(ct, ct.init)
    assert h == INF
    with pytest.raises(Unsolvable):
        plan(task)


def test_exhausted_search_is_unsolvable():
    # one block cannot fill two spaces, though the relaxation allows it
    task = task_for(container_world(2, {0: "b1", 1: "b2"}, (("oc", "in", "s0", "b2"), ("oc", "in", "s1", "b2"))))
    ct = CompiledTask(task)
    assert relaxed_plan_heuristic(ct, ct.init)[0] < INF
    with pytest.raises(Unsolvable):
        plan(task)


@pytest.mark.parametrize("cfg", [
    PlannerConfig(),
    PlannerConfig(heuristic="add"),
    PlannerConfig(use_preferred=False),
    PlannerConfig(heuristic="blind"),
], ids=["ff", "add", "no-preferred", "blind"])
def test_configs_agree_with_bfs(cfg):
    for label, world in itertools.islice(micro_worlds(), 0, None, 5):
        task = task_for(world)
        ref = breadth_first_search(task)
        try:
            got = plan(task, cfg).plan
        except Unsolvable:
            got = None
        assert (ref is None) == (got is None), label
        if got is not None:
            assert validate(got, task.init | task.statics, task.goal), label
            assert len(got) >= len(ref)


def test_trivial_goal_gives_empty_plan():
    task = task_for(support_world(2, {0: ["b1"]}, (("oc", "on", "t0", "b1"),)))
    r = plan(task)
    assert r.plan == [] and len(r) == 0
    assert breadth_first_search(task) == []


def test_expansion_limit():
    task = task_for(WORLDS[0])
    with pytest.raises(ResourceLimit):
        plan(task, PlannerConfig(heuristic="blind", max_expansions=1))


def test_bfs_state_limit():
    task = task_for(WORLDS[0])
    with pytest.raises(ResourceLimit):
        breadth_first_search(task, max_states=3)


def test_search_is_deterministic():
    task = task_for(WORLDS[1])
    a, b = plan(task), plan(task)
    assert [str(x) for x in a.plan] == [str(x) for x in b.plan]
    assert a.stats.expansions == b.stats.expansions


def test_config_validation():
    with pytest.raises(ValueError):
        PlannerConfig(heuristic="lama")
    with pytest.raises(ValueError):
        PlannerConfig(max_expansions=0)
    with pytest.raises(ValueError):
        PlannerConfig(time_limit=-1)
