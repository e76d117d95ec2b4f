"""Run both built-in scenarios three times and print the comparison table.

Run: python3 demos/benchmarks.py [report.json]
"""

import sys

from utamp.bench import SCENARIOS, run_bench

report = run_bench([make() for make in SCENARIOS.values()], repetitions=3)
print(report.table())
for row in report.rows:
    print(f"{row.name}: {row.actions} ground actions, {row.expansions} expansions, "
          f"grounding {row.ground_seconds:.2f} s, search {row.search_seconds:.2f} s")
if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as f:
        f.write(report.to_json())
