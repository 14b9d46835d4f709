"""Parameter sweeps: vary one parameter (or one objective weight), re-run
the sizing optimization per point, and emit trend tables.

Each sweep point uses the same solver, budget and seed so differences
between rows reflect the parameter, not solver noise.  Per-point failures
are recorded and the sweep continues; the output always has one row per
requested value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .economics import Weights, weighted_objective
from .errors import InputDataError
from .simulate import Design, SimulationContext, simulate_year
from .solvers import SearchSpace, pso_minimize

SWEEP_PARAMETERS = ("dg_rated", "fuel_price", "nominal_rate", "inflation",
                    "bs_price", "w1", "w2", "w3", "w4", "w5")

# default ranges for the sensitivity analyses
DEFAULT_RANGES = {
    "dg_rated": [0.0, 4.0, 8.0, 12.0, 16.0, 20.0],            # kW
    "fuel_price": [0.2, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],      # $/gal
    "nominal_rate": [0.0, 0.04, 0.08, 0.12, 0.16, 0.20],
    "inflation": [0.0, 0.03, 0.06, 0.09, 0.12, 0.15],
    "bs_price": [50.0, 100.0, 150.0, 200.0, 250.0, 300.0],    # $/kWh
}
for _w in ("w1", "w2", "w3", "w4", "w5"):
    DEFAULT_RANGES[_w] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]

SWEEP_CSV_HEADER = ["value", "n_s", "n_w", "e_b", "lcoe_norm", "em_norm",
                    "dpsp", "repg", "one_minus_ref", "dg_hours", "bs_cycles",
                    "weighted_obj", "status"]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise InputDataError(
                f"unknown sweep parameter {self.parameter!r}; "
                f"pick from {SWEEP_PARAMETERS}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise InputDataError("sweep needs at least one value")
        if list(vals) != sorted(vals):
            raise InputDataError("sweep values must be sorted ascending")
        if self.parameter.startswith("w") and not all(0 <= v <= 1 for v in vals):
            raise InputDataError("weight sweep values must be in [0, 1]")
        object.__setattr__(self, "values", vals)

    @classmethod
    def default(cls, parameter: str) -> "SweepSpec":
        return cls(parameter, tuple(DEFAULT_RANGES[parameter]))


def apply_override(ctx: SimulationContext, weights: Weights, parameter: str,
                   value: float):
    """Return (context, weights) with one parameter overridden.

    Weight sweeps fix w_i = value and split the remainder equally over the
    other four weights.
    """
    if parameter == "dg_rated":
        gen = replace(ctx.generator, rated_power=float(value))
        new_ctx = replace(ctx, generator=gen)
        return new_ctx, weights
    if parameter == "fuel_price":
        gen = replace(ctx.generator, fuel_price=float(value))
        base = replace(ctx.baseline_generator, fuel_price=float(value))
        return replace(ctx, generator=gen, baseline_generator=base), weights
    if parameter == "nominal_rate":
        return replace(ctx, fin=replace(ctx.fin, nominal_rate=float(value))), weights
    if parameter == "inflation":
        return replace(ctx, fin=replace(ctx.fin, inflation=float(value))), weights
    if parameter == "bs_price":
        return replace(ctx, costs=replace(ctx.costs, bs_capital_per_kwh=float(value))), weights
    if parameter in ("w1", "w2", "w3", "w4", "w5"):
        i = int(parameter[1]) - 1
        rest = (1.0 - value) / 4.0
        vals = [rest] * 5
        vals[i] = float(value)
        return ctx, Weights(tuple(vals))
    raise InputDataError(f"unknown sweep parameter {parameter!r}")


def _fresh_context(ctx: SimulationContext) -> SimulationContext:
    # dataclasses.replace would keep the cached baseline; rebuild instead
    return SimulationContext(
        climate=ctx.climate, load=ctx.load, pv=ctx.pv, wind=ctx.wind,
        battery=ctx.battery, generator=ctx.generator, converter=ctx.converter,
        costs=ctx.costs, fin=ctx.fin, strategy=ctx.strategy,
        baseline_generator=ctx.baseline_generator)


@dataclass
class SweepRow:
    value: float
    design: Design | None
    objectives: object
    dg_hours: int
    bs_cycles: float
    weighted_obj: float
    status: str = "ok"


def _sweep_point(task) -> SweepRow:
    parameter, value, ctx, weights, space, seed, max_evals, swarm_size = task
    try:
        point_ctx, point_w = apply_override(ctx, weights, parameter, value)
        point_ctx = _fresh_context(point_ctx)

        def objective(x, c=point_ctx, w=point_w):
            d = Design(round(x[0]), round(x[1]), float(x[2]))
            return weighted_objective(simulate_year(d, c).objectives, w)

        report = pso_minimize(objective, space, swarm_size=swarm_size,
                              max_evals=max_evals, seed=seed)
        design = Design(round(report.best_point[0]),
                        round(report.best_point[1]),
                        float(report.best_point[2]))
        sim = simulate_year(design, point_ctx)
        return SweepRow(value, design, sim.objectives, sim.dg_online_hours,
                        sim.battery_cycles, report.best_value)
    except Exception as exc:
        return SweepRow(value, None, None, 0, 0.0, float("nan"),
                        status=f"failed: {exc}")


def run_sweep(spec: SweepSpec, ctx: SimulationContext, weights: Weights,
              space: SearchSpace, seed: int = 0, max_evals: int = 2000,
              swarm_size: int = 30, workers: int = 1) -> list[SweepRow]:
    """Re-optimize the sizing problem at each sweep value (same seed and
    budget per point).  Points run in parallel when ``workers > 1``; the
    output row order always follows ``spec.values``."""
    tasks = [(spec.parameter, value, ctx, weights, space, seed, max_evals,
              swarm_size) for value in spec.values]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(task) for task in tasks]


def objective_at_fixed_design(design: Design, overrides: dict,
                              ctx: SimulationContext, weights: Weights):
    """Simulate one design under parameter overrides, no re-optimization.

    Separates direct cost effects from re-sizing effects in sweep trends.
    Returns (SimResult, weighted objective); absolute costs live on the
    result's cost breakdown.
    """
    point_ctx, point_w = ctx, weights
    for parameter, value in overrides.items():
        point_ctx, point_w = apply_override(point_ctx, point_w, parameter, value)
    point_ctx = _fresh_context(point_ctx)
    sim = simulate_year(design, point_ctx)
    return sim, weighted_objective(sim.objectives, point_w)


def sweep_to_csv(rows: list[SweepRow], path):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_CSV_HEADER)
        for r in rows:
            if r.design is None:
                writer.writerow([r.value] + [""] * 10 + [r.status])
                continue
            o = r.objectives
            writer.writerow([
                r.value, int(r.design.pv_units), int(r.design.wt_units),
                f"{r.design.e_b_init:.3f}", f"{o.lcoe_norm:.5f}",
                f"{o.em_norm:.5f}", f"{o.dpsp:.6f}", f"{o.repg:.5f}",
                f"{o.one_minus_ref:.5f}", r.dg_hours, f"{r.bs_cycles:.1f}",
                f"{r.weighted_obj:.5f}", r.status,
            ])
