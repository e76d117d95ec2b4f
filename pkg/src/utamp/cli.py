"""``utamp`` command line.

Exit codes: 0 success, 1 planning failure or invalid plan, 2 I/O, parse or
usage error, 3 simulation failure.  Set ``UTAMP_LOG=info`` (or ``debug``) for
progress logging on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__, pddl, scenefile
from .bench import SCENARIOS, Scenario, run_bench
from .executor import decompose, simulate
from .perception import PerceptionError
from .planner import PlannerConfig, ResourceLimit, Unsolvable, plan
from .symbolic import CONTAINER, HYBRID, SUPPORT, ground, parse_action_string, validate

OK, PLAN_FAILED, BAD_INPUT, SIM_FAILED = 0, 1, 2, 3
DOMAIN_FLAGS = {"support": SUPPORT, "container": CONTAINER, "hybrid": HYBRID}

log = logging.getLogger("utamp")


class InputError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="utamp", description="Task and motion planning on block worlds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def source(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--scene", type=Path, help="scene file (JSON)")
        g.add_argument("--task", choices=("1", "2"), help="built-in benchmark scenario")
        sp.add_argument("--goal", type=Path, help="goal file: (and (oc in s1 b1) ...)")
        sp.add_argument("--domain", choices=sorted(DOMAIN_FLAGS), help="override the scene's domain kind")

    def search(sp):
        sp.add_argument("--heuristic", choices=("ff", "add"), default="ff")
        sp.add_argument("--no-preferred", action="store_true", help="disable preferred operators")
        sp.add_argument("--max-expansions", type=int, default=PlannerConfig.max_expansions)
        sp.add_argument("--time-limit", type=float, default=PlannerConfig.time_limit, help="seconds")

    sp = sub.add_parser("plan", help="plan for a scene and goal, print the plan")
    source(sp)
    search(sp)
    sp.add_argument("--out", type=Path, help="write the plan, one action per line")

    sp = sub.add_parser("simulate", help="plan, decompose and simulate")
    source(sp)
    search(sp)
    sp.add_argument("--out", type=Path, help="write the execution report (JSON)")
    sp.add_argument("--trace", type=Path, help="write the per-command trace (JSON)")

    sp = sub.add_parser("bench", help="run the built-in scenarios")
    sp.add_argument("--task", choices=("1", "2"), action="append", help="repeatable; default all")
    sp.add_argument("--reps", type=int, default=1, help="repetitions for timing (median)")
    sp.add_argument("--out", type=Path, help="write the report (JSON)")
    search(sp)

    sp = sub.add_parser("export-pddl", help="write domain.pddl, problem.pddl and scene.json")
    source(sp)
    sp.add_argument("--out", type=Path, default=Path("."), help="output directory")

    sp = sub.add_parser("validate", help="replay a plan file against a problem")
    sp.add_argument("plan", type=Path)
    source(sp)
    sp.add_argument("--pddl", type=Path, metavar="DIR",
                    help="directory holding domain.pddl and problem.pddl")
    return p


def _config(args) -> PlannerConfig:
    try:
        return PlannerConfig(heuristic=args.heuristic, use_preferred=not args.no_preferred,
                             max_expansions=args.max_expansions, time_limit=args.time_limit)
    except ValueError as e:
        raise InputError(str(e)) from None


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror or e}") from None


def _scenario(args) -> Scenario:
    """Scenario from ``--task`` or ``--scene`` with goal/domain overrides."""
    if args.task:
        sc = SCENARIOS[f"task{args.task}"]()
        planning = {}
    elif args.scene:
        try:
            scene, planning = scenefile.loads(_read(args.scene))
        except scenefile.SceneFormatError as e:
            raise InputError(f"{args.scene}: {e}") from None
        planning = planning or {}
        sc = None
    else:
        raise InputError("one of --scene or --task is required")

    goal = None
    if args.goal:
        try:
            goal = pddl.parse_goal(_read(args.goal))
        except pddl.ParseError as e:
            raise InputError(f"{args.goal}:{e}") from None
    kind = DOMAIN_FLAGS[args.domain] if args.domain else None

    if sc is not None:
        changes = {}
        if goal is not None:
            changes["goal"] = goal
        if kind is not None:
            changes["domain_kind"] = kind
        return dataclasses.replace(sc, **changes)

    goal = goal if goal is not None else tuple(tuple(a) for a in planning.get("goal", ()))
    if not goal:
        raise InputError("no goal: pass --goal or add planning.goal to the scene")

    def table(key):
        v = planning.get(key)
        return None if v is None else tuple(tuple(x) for x in v)

    try:
        return Scenario(
            args.scene.stem, scene, kind or planning.get("domain", HYBRID),
            table("grasps"), tuple(goal), tuple(planning.get("extensions", ())),
            table("facts") or (), placement_whitelist=table("placements"))
    except (TypeError, ValueError) as e:
        raise InputError(f"{args.scene}: bad planning block: {e}") from None


def _ground(sc: Scenario):
    try:
        return sc.task()
    except (PerceptionError, ValueError) as e:
        raise InputError(f"cannot build problem: {e}") from None


def _solve(sc: Scenario, args):
    task = _ground(sc)
    log.info("grounded %d actions", len(task.actions))
    try:
        return task, plan(task, _config(args))
    except (Unsolvable, ResourceLimit) as e:
        print(f"planning failed: {type(e).__name__}: {e}", file=sys.stderr)
        return task, None


def cmd_plan(args) -> int:
    sc = _scenario(args)
    task, result = _solve(sc, args)
    if result is None:
        return PLAN_FAILED
    lines = [str(a) for a in result.plan]
    text = "".join(l + "\n" for l in lines)
    sys.stdout.write(text)
    st = result.stats
    print(f"; length {len(lines)}, {st.expansions} expansions, {st.evaluations} evaluations, "
          f"{st.seconds:.3f} s", file=sys.stderr)
    if args.out:
        _write(args.out, text)
    return OK


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    task, result = _solve(sc, args)
    if result is None:
        return PLAN_FAILED
    try:
        commands = decompose(result.plan, sc.scene)
    except ValueError as e:
        print(f"decomposition failed: {e}", file=sys.stderr)
        return SIM_FAILED
    report = simulate(commands, sc.scene, sc.goal)
    if args.out:
        _write(args.out, report.to_json() + "\n")
    if args.trace:
        _write(args.trace, json.dumps(report.trace, indent=1, sort_keys=True) + "\n")
    print(f"plan length {len(result.plan)}, {len(commands)} motion commands, "
          f"{len(report.collisions)} collisions, success {report.success}")
    if not report.success:
        print(f"simulation failed: {report.error or 'goal not reached'}", file=sys.stderr)
        return SIM_FAILED
    return OK


def cmd_bench(args) -> int:
    names = [f"task{t}" for t in (args.task or ("1", "2"))]
    if args.reps < 1:
        raise InputError("--reps must be at least 1")
    report = run_bench([SCENARIOS[n]() for n in dict.fromkeys(names)], _config(args), args.reps)
    sys.stdout.write(report.table())
    if args.out:
        _write(args.out, report.to_json())
    if any(r.length is None for r in report.rows):
        return PLAN_FAILED
    return OK if report.all_passed else SIM_FAILED


def cmd_export(args) -> int:
    sc = _scenario(args)
    dom, prob = sc.problem()
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create {args.out}: {e.strerror or e}") from None
    _write(args.out / "domain.pddl", pddl.write_domain(dom))
    _write(args.out / "problem.pddl", pddl.write_problem(prob))
    _write(args.out / "scene.json", scenefile.dumps(sc.scene, sc.planning()))
    print(f"wrote domain.pddl, problem.pddl and scene.json to {args.out}")
    return OK


def cmd_validate(args) -> int:
    if args.pddl:
        try:
            dom = pddl.parse_domain(_read(args.pddl / "domain.pddl"))
            prob = pddl.parse_problem(_read(args.pddl / "problem.pddl"))
        except pddl.ParseError as e:
            raise InputError(f"{args.pddl}: {e}") from None
        try:
            task = ground(dom, prob)
        except ValueError as e:
            raise InputError(str(e)) from None
    else:
        task = _ground(_scenario(args))
    steps = []
    for n, line in enumerate(_read(args.plan).splitlines(), 1):
        line = line.split(";", 1)[0].strip()
        if not line:
            continue
        try:
            steps.append(parse_action_string(line, task))
        except ValueError as e:
            raise InputError(f"{args.plan}:{n}: {e}") from None
    check = validate(steps, task.init | task.statics, task.goal)
    print(f"{len(steps)} actions: {check}")
    return OK if check else PLAN_FAILED


COMMANDS = {"plan": cmd_plan, "simulate": cmd_simulate, "bench": cmd_bench,
            "export-pddl": cmd_export, "validate": cmd_validate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("UTAMP_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:      # argparse already printed the synopsis
        return OK if e.code == 0 else BAD_INPUT
    try:
        return COMMANDS[args.command](args)
    except InputError as e:
        print(f"utamp: {e}", file=sys.stderr)
        return BAD_INPUT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
