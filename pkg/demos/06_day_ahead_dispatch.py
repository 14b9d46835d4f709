"""Day-ahead dispatch of the sized system, plus robustness scenarios.

Optimizes the 24-hour generator/battery schedule for the first day of the
bundled year against the rule-based strategy it must beat, then stresses
the schedule with low-renewable and reshaped-demand days.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from offgridopt.config import build_config, build_context
from offgridopt.devices import GeneratorSpec
from offgridopt.dispatch import (Scenario, day_context, optimize_day,
                                 robustness_suite, suite_to_csv)
from offgridopt.economics import Weights
from offgridopt.seeding import substream_seed
from offgridopt.simulate import Design
from offgridopt.timeseries import flatten_load, make_peaky_load

config = build_config({})
ctx = build_context(config, seed=42)
weights = Weights((0.25, 0.25, 0.25, 0.25))
seed = substream_seed(42, "solver")

# a tighter 8 kW generator makes the scheduling problem interesting
dctx = day_context(ctx, Design.from_counts(100, 7, 52.55), day=0,
                   weights=weights, dpsp_max=0.01,
                   generator=GeneratorSpec(rated_power=8.0))

result = optimize_day(dctx, seed=seed)
ev, rb = result.evaluation, result.rule_based_evaluation
print("baseline day, 8 kW diesel:")
print(f"  optimized weighted objective  {ev.weighted:.4f} "
      f"(rule-based {rb.weighted:.4f})")
print(f"  daily cost ${ev.c_daily:.2f}, DPSP {ev.dpsp:.4f}, "
      f"REF {1 - ev.objectives.one_minus_ref:.3f}, feasible {result.feasible}")
result.schedule.write_csv("dispatch_schedule.csv", dctx, ev)
print("  hourly schedule written to dispatch_schedule.csv")

scenarios = [
    Scenario("baseline"),
    Scenario("low_solar", irr_factor=0.1),
    Scenario("low_wind", wind_factor=0.1),
    Scenario("low_both", irr_factor=0.1, wind_factor=0.1),
    Scenario("peaky_load",
             load=make_peaky_load(dctx.load, 0.30,
                                  substream_seed(42, "peaky-load"))),
    Scenario("flat_shifted", load=flatten_load(dctx.load, dctx.res_dc, 0.0)),
    Scenario("flat_plus_curtail",
             load=flatten_load(dctx.load, dctx.res_dc, 0.10)),
]
rows = robustness_suite(dctx, scenarios, seed=seed)

print(f"\n{'scenario':<18} {'obj':>7} {'coe_n':>7} {'em_n':>7} {'dpsp':>7} "
      f"{'dump':>6} {'ref':>6} feasible")
for r in rows:
    print(f"{r['scenario']:<18} {r['summary_obj']:>7.4f} {r['coe_norm']:>7.4f} "
          f"{r['em_norm']:>7.4f} {r['dpsp']:>7.4f} {r['repg']:>6.3f} "
          f"{r['ref']:>6.3f} {r['feasible']}")
suite_to_csv(rows, "dispatch_scenarios.csv")
print("\nscenario summary written to dispatch_scenarios.csv")
print("wind lulls force the diesel to carry the day; reshaped (flatter)")
print("demand beats the peaky profile on every objective.")
