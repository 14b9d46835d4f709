"""Benchmark the five global solvers on the sizing problem.

Each solver gets the same evaluation budget and seed; the table ranks them
by the overall metric (runtime x best objective, lower is better).
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from offgridopt.config import build_config, build_context
from offgridopt.economics import weighted_objective
from offgridopt.seeding import substream_seed
from offgridopt.simulate import Design, simulate_year
from offgridopt.solvers import benchmark_to_csv, solver_benchmark

budget = int(sys.argv[1]) if len(sys.argv) > 1 else 1000

config = build_config({})
ctx = build_context(config, seed=42)


def objective(x):
    design = Design(round(x[0]), round(x[1]), float(x[2]))
    return weighted_objective(simulate_year(design, ctx).objectives,
                              config.weights)


reports = solver_benchmark(objective, config.search_space(),
                           solvers=("pso", "ga", "sa", "ps", "ms"),
                           seed=substream_seed(42, "solver"),
                           max_evals=budget)

print(f"{'solver':<16} {'t [s]':>8} {'min obj':>9} {'overall':>9}  best point")
for r in reports:
    point = ", ".join(f"{v:g}" for v in r.best_point)
    print(f"{r.solver:<16} {r.runtime_s:>8.2f} {r.best_value:>9.4f} "
          f"{r.overall:>9.3f}  [{point}]")

benchmark_to_csv(reports, "solver_benchmark.csv")
print("\ntable written to solver_benchmark.csv")
