"""Export the kitchen scenario to PDDL, read it back, and check a plan against it.

Run: python3 demos/pddl_round_trip.py OUTDIR
"""

import sys
from pathlib import Path

from utamp import pddl, scenefile
from utamp.bench import scenario_task2
from utamp.planner import plan
from utamp.symbolic import ground, parse_action_string, validate

out = Path(sys.argv[1] if len(sys.argv) > 1 else "pddl-out")
out.mkdir(parents=True, exist_ok=True)

sc = scenario_task2()
domain, problem = sc.problem()
(out / "domain.pddl").write_text(pddl.write_domain(domain))
(out / "problem.pddl").write_text(pddl.write_problem(problem))
scenefile.save(out / "scene.json", sc.scene, sc.planning())

# everything below uses only the files
domain2 = pddl.parse_domain((out / "domain.pddl").read_text())
problem2 = pddl.parse_problem((out / "problem.pddl").read_text())
print("byte-identical re-export:", pddl.write_domain(domain2) == (out / "domain.pddl").read_text()
      and pddl.write_problem(problem2) == (out / "problem.pddl").read_text())

task = ground(domain2, problem2)
steps = [str(a) for a in plan(task).plan]
(out / "plan.txt").write_text("\n".join(steps) + "\n")
replayed = [parse_action_string(s, task) for s in steps]
print(f"{len(steps)}-step plan:", validate(replayed, task.init | task.statics, task.goal))
print("files in", out, sorted(p.name for p in out.iterdir()))
