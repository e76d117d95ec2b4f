"""Move one block between two supports and replay the plan kinematically.

Run: python3 demos/one_block.py
"""

from utamp.executor import decompose, simulate
from utamp.geom import BBox, Kind, PhysicalObject, Pose
from utamp.perception import Scene, make_problem, perceive
from utamp.planner import plan
from utamp.symbolic import SUPPORT, builtin_domain, fmt_atom, ground

SLAB = BBox(0.08, 0.08, 0.03)
CUBE = BBox(0.05, 0.05, 0.05)

scene = Scene((
    PhysicalObject("pad-a", Pose((0.6, 0.0, 0.385)), SLAB, movable=False),
    PhysicalObject("pad-b", Pose((0.6, 0.2, 0.385)), SLAB, movable=False),
    PhysicalObject("b1", Pose((0.6, 0.0, 0.425)), CUBE),
))

print("perceived state (occupied parts only):")
for atom in sorted(perceive(scene)):
    if atom[0] == "oc" and atom[3] != "air":
        print("  ", fmt_atom(atom))

goal = [("oc", "on", "pad-b", "b1")]
domain, statics = builtin_domain(SUPPORT, grasp_whitelist=[("front", "left", "right")])
task = ground(domain, make_problem(scene, goal, domain.name, statics))
result = plan(task)
print(f"\n{len(task.actions)} ground actions; plan:")
for a in result.plan:
    print("  ", a)

commands = decompose(result.plan, scene)
report = simulate(commands, scene, goal)
print(f"\n{len(commands)} motion commands, {len(report.collisions)} collisions, success={report.success}")
print("b1 ends at", report.final_scene.get("b1").pose.position)
