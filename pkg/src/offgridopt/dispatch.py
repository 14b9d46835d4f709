"""Day-ahead (24 h) economic-environmental dispatch of a sized system.

The decision variables are the hourly generator output and battery power for
the next day.  The generator is semicontinuous (off, or between its minimum
and rated output), battery power is bounded and must keep the SOC inside its
safe window for all 25 knot points, and the daily lost-load share must stay
under ``dpsp_max``.  The search is two-level: the 24-bit generator ON/OFF
pattern is explored by seeded hill-climbing warm-started from the rule-based
schedule, and the continuous setpoints inside a pattern are refined by
projected coordinate descent with an exact penalty on the DPSP constraint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from . import economics
from .devices import battery_power_limit, battery_step
from .economics import ObjectiveVector, Weights
from .errors import InputDataError
from .simulate import (Design, SimulationContext, dispatch_cascade,
                       renewable_feed_in)
from .timeseries import ClimateSeries, LoadSeries

SCHEDULE_HEADER = ["hour", "p_dg", "p_bs", "soc", "p_res", "load", "dump", "lost"]
CONSTRAINT_TOL = 1e-6


@dataclass
class DispatchContext:
    """Fixed system + one day of climate/load for the dispatch problem."""

    design: Design
    climate: ClimateSeries          # 24 hours
    load: LoadSeries                # 24 hours
    pv: object
    wind: object
    battery: object
    generator: object
    converter: object
    costs: object
    fin: object
    baseline_generator: object
    weights: Weights                # 4 entries: COE, emissions, REPG, 1-REF
    dpsp_max: float = 0.01
    soc_start: float | None = None
    wt_printed_curve: bool = False

    def __post_init__(self):
        if len(self.climate) != 24 or len(self.load) != 24:
            raise InputDataError("dispatch context needs 24-hour series")
        if not 0 <= self.dpsp_max <= 1:
            raise InputDataError("dpsp_max must be in [0, 1]")
        if len(self.weights) != 4:
            raise InputDataError("dispatch uses 4 objective weights")
        if self.soc_start is None:
            self.soc_start = self.battery.soc_max
        _, _, res_dc = renewable_feed_in(self.design, self.climate, self.pv,
                                         self.wind, self.converter,
                                         printed_curve=self.wt_printed_curve)
        self.res_dc = res_dc
        self.demand_dc = self.load.demand / self.converter.eta_inv
        self.battery_capacity_kwh = self.design.e_b_init
        self.power_limit = (battery_power_limit(self.design.e_b_init, self.battery)
                            if self.design.e_b_init > 0 else 0.0)
        self.capital = economics.initial_capital(
            self.design.pv_kw(self.pv), self.design.wt_kw(self.wind),
            self.design.e_b_init, self.generator.rated_power, self.costs)
        self._baseline = None

    @property
    def daily_baseline(self):
        """COE and emissions of the baseline generator serving the whole day
        by itself (online 24 h, one startup and one shutdown)."""
        if self._baseline is None:
            gen = self.baseline_generator
            energy = self.load.total_kwh
            c = (economics.fuel_cost(gen, energy, 24.0)
                 + economics.variable_om(gen, self.costs, 24.0, energy)
                 + self.costs.startup_cost + self.costs.shutdown_cost
                 + self.costs.om_fix_dg * self.costs.dg_capital_per_kw
                 * gen.rated_power / 365.0)
            self._baseline = (c / energy, economics.emissions_total(energy, gen))
        return self._baseline


def day_context(ctx: SimulationContext, design: Design, day: int,
                weights: Weights, dpsp_max: float = 0.01,
                generator=None) -> DispatchContext:
    """Slice day ``day`` out of an annual simulation context."""
    return DispatchContext(
        design=design,
        climate=ctx.climate.slice(24 * day, 24 * (day + 1)),
        load=ctx.load.day(day),
        pv=ctx.pv, wind=ctx.wind, battery=ctx.battery,
        generator=generator or ctx.generator, converter=ctx.converter,
        costs=ctx.costs, fin=ctx.fin,
        baseline_generator=ctx.baseline_generator,
        weights=weights, dpsp_max=dpsp_max,
        wt_printed_curve=ctx.strategy.wt_printed_curve,
    )


@dataclass
class DispatchSchedule:
    p_dg: np.ndarray      # generator setpoints, AC [kW], 24 entries
    p_bs: np.ndarray      # battery power, +discharge/-charge, DC [kW], 24
    soc: np.ndarray       # 25 knots including end-of-day state
    feasible: bool = True

    def copy(self) -> "DispatchSchedule":
        return DispatchSchedule(self.p_dg.copy(), self.p_bs.copy(),
                                self.soc.copy(), self.feasible)

    def write_csv(self, path, ctx: DispatchContext, evaluation=None):
        ev = evaluation or evaluate_schedule(self, ctx)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SCHEDULE_HEADER)
            for h in range(24):
                writer.writerow([
                    h, f"{self.p_dg[h]:.4f}", f"{self.p_bs[h]:.4f}",
                    f"{self.soc[h]:.5f}", f"{ctx.res_dc[h]:.4f}",
                    f"{ctx.load.demand[h]:.4f}", f"{ev.dump[h]:.4f}",
                    f"{ev.lost[h]:.4f}",
                ])


@dataclass
class DispatchEvaluation:
    objectives: ObjectiveVector      # (coe_norm, em_norm, repg, 1-ref) + dpsp
    weighted: float                  # 4-term scalarization per the weights
    summary5: float                  # equal-weight 5-term summary metric
    c_daily: float
    coe: float
    dpsp: float
    dump: np.ndarray
    lost: np.ndarray
    soc: np.ndarray
    violations: dict
    feasible: bool


def propagate_soc(ctx: DispatchContext, p_bs: np.ndarray) -> np.ndarray:
    soc = np.empty(25)
    soc[0] = ctx.soc_start
    cap = ctx.battery_capacity_kwh
    if cap <= 0:
        soc[:] = ctx.soc_start
        return soc
    for t in range(24):
        soc[t + 1] = battery_step(soc[t], float(p_bs[t]), 1.0, cap, ctx.battery)
    return soc


def evaluate_schedule(s: DispatchSchedule, ctx: DispatchContext) -> DispatchEvaluation:
    """Cost, objectives and constraint residuals of a candidate schedule.

    SOC is re-propagated from the schedule's battery powers; dump and lost
    load are the positive/negative parts of the DC-bus balance residual.
    Infeasibility is reported through ``violations``, never raised.
    """
    gen = ctx.generator
    p_dg = np.asarray(s.p_dg, dtype=float)
    p_bs = np.asarray(s.p_bs, dtype=float)
    soc = propagate_soc(ctx, p_bs)

    net = ctx.res_dc + ctx.converter.eta_rec * p_dg + p_bs - ctx.demand_dc
    dump = np.maximum(net, 0.0)
    lost = np.maximum(-net, 0.0) * ctx.converter.eta_inv

    online = p_dg > CONSTRAINT_TOL
    on_hours = int(online.sum())
    energy = float(p_dg.sum())
    starts = int(np.count_nonzero(online[1:] & ~online[:-1])) + int(online[0])
    stops = int(np.count_nonzero(~online[1:] & online[:-1])) + int(online[-1])

    c_daily = (economics.fuel_cost(gen, energy, on_hours)
               + economics.variable_om(gen, ctx.costs, on_hours, energy)
               + ctx.costs.startup_cost * starts + ctx.costs.shutdown_cost * stops
               + economics.fixed_om(ctx.capital, ctx.costs) / 365.0)

    load_kwh = ctx.load.total_kwh
    coe = c_daily / load_kwh
    coe_base, em_base = ctx.daily_baseline
    emissions = economics.emissions_total(energy, gen)
    gen_dc = float(ctx.res_dc.sum()) + ctx.converter.eta_rec * energy
    dpsp = float(lost.sum()) / load_kwh
    repg = economics.metrics_repg(float(dump.sum()), gen_dc)
    ref = economics.metrics_ref(float(ctx.res_dc.sum()), gen_dc)

    objectives = ObjectiveVector(
        lcoe_norm=coe / coe_base, em_norm=emissions / em_base,
        dpsp=dpsp, repg=repg, one_minus_ref=1.0 - ref)
    weighted = float(np.dot(np.array(ctx.weights.values),
                            [objectives.lcoe_norm, objectives.em_norm,
                             objectives.repg, objectives.one_minus_ref]))
    summary5 = float(np.mean([objectives.lcoe_norm, objectives.em_norm, dpsp,
                              objectives.repg, objectives.one_minus_ref]))

    semicont = np.maximum(0.0, np.where(online, gen.min_power - p_dg, 0.0))
    over_rated = np.maximum(0.0, p_dg - gen.rated_power)
    over_power = np.maximum(0.0, np.abs(p_bs) - ctx.power_limit)
    soc_low = np.maximum(0.0, ctx.battery.soc_min - soc)
    soc_high = np.maximum(0.0, soc - ctx.battery.soc_max)
    violations = {
        "dg_semicontinuous": float(semicont.max()),
        "dg_rated": float(over_rated.max()),
        "battery_power": float(over_power.max()),
        "soc_bounds": float(max(soc_low.max(), soc_high.max())),
        "dpsp": max(0.0, dpsp - ctx.dpsp_max),
    }
    feasible = all(v <= CONSTRAINT_TOL for v in violations.values())
    return DispatchEvaluation(objectives, weighted, summary5, c_daily, coe,
                              dpsp, dump, lost, soc, violations, feasible)


def rule_based_schedule(ctx: DispatchContext) -> DispatchSchedule:
    """The sizing simulator's load-following cascade applied to this day."""
    p_dg, p_bs, _, _, _, _, _ = dispatch_cascade(
        ctx.res_dc.tolist(), ctx.demand_dc.tolist(), ctx.battery,
        ctx.battery_capacity_kwh, ctx.generator, True,
        eta_rec=ctx.converter.eta_rec, soc_start=ctx.soc_start)
    p_dg = np.array(p_dg)
    p_bs = np.array(p_bs)
    return DispatchSchedule(p_dg, p_bs, propagate_soc(ctx, p_bs))


def _penalized(ev: DispatchEvaluation, mu: float = 200.0) -> float:
    pen = (ev.violations["dg_semicontinuous"] + ev.violations["dg_rated"]
           + ev.violations["battery_power"] + 10.0 * ev.violations["soc_bounds"]
           + ev.violations["dpsp"])
    return ev.weighted + mu * pen


def _refine_continuous(s: DispatchSchedule, ctx: DispatchContext,
                       sweeps: int = 6) -> tuple[DispatchSchedule, DispatchEvaluation]:
    """Projected coordinate descent over the hourly setpoints with the ON
    pattern held fixed."""
    gen = ctx.generator
    s = s.copy()
    best = evaluate_schedule(s, ctx)
    best_val = _penalized(best)
    p_lim = ctx.power_limit
    for sweep in range(sweeps):
        scale = 0.5 ** sweep
        dg_steps = [d * scale for d in (-4.0, -1.0, 1.0, 4.0)]
        bs_steps = [d * scale for d in (-4.0, -1.0, 1.0, 4.0)]
        improved = False
        for t in range(24):
            if s.p_dg[t] > 0:
                for d in dg_steps:
                    cand = float(np.clip(s.p_dg[t] + d, gen.min_power, gen.rated_power))
                    if cand == s.p_dg[t]:
                        continue
                    old = s.p_dg[t]
                    s.p_dg[t] = cand
                    ev = evaluate_schedule(s, ctx)
                    val = _penalized(ev)
                    if val < best_val - 1e-12:
                        best, best_val, improved = ev, val, True
                    else:
                        s.p_dg[t] = old
            if p_lim > 0:
                for d in bs_steps:
                    cand = float(np.clip(s.p_bs[t] + d, -p_lim, p_lim))
                    if cand == s.p_bs[t]:
                        continue
                    old = s.p_bs[t]
                    s.p_bs[t] = cand
                    ev = evaluate_schedule(s, ctx)
                    val = _penalized(ev)
                    if val < best_val - 1e-12:
                        best, best_val, improved = ev, val, True
                    else:
                        s.p_bs[t] = old
        if not improved:
            break
    s.soc = propagate_soc(ctx, s.p_bs)
    s.feasible = best.feasible
    return s, best


def _apply_pattern(s: DispatchSchedule, pattern: np.ndarray,
                   ctx: DispatchContext) -> DispatchSchedule:
    gen = ctx.generator
    out = s.copy()
    for t in range(24):
        if pattern[t]:
            if out.p_dg[t] <= 0:
                out.p_dg[t] = gen.min_power if gen.min_power > 0 else min(1.0, gen.rated_power)
            out.p_dg[t] = float(np.clip(out.p_dg[t], gen.min_power, gen.rated_power))
        else:
            out.p_dg[t] = 0.0
    out.soc = propagate_soc(ctx, out.p_bs)
    return out


@dataclass
class DispatchResult:
    schedule: DispatchSchedule
    evaluation: DispatchEvaluation
    rule_based: DispatchSchedule
    rule_based_evaluation: DispatchEvaluation
    feasible: bool
    message: str = ""


def optimize_day(ctx: DispatchContext, initial: DispatchSchedule | None = None,
                 max_patterns: int = 120, seed: int = 0,
                 inner_sweeps: int = 6) -> DispatchResult:
    """Optimize the next day's generator and battery schedule.

    The rule-based schedule is always a candidate, so the returned schedule
    is never worse than it (when the rule-based day is feasible).  When no
    candidate satisfies every hard constraint the best-found infeasible
    schedule is returned with ``feasible=False`` and its residuals.
    """
    if ctx.generator.rated_power <= 0:
        raise InputDataError("dispatch needs a generator with positive rating")
    rng = np.random.default_rng(seed)
    gen = ctx.generator

    rb = rule_based_schedule(ctx)
    rb_ev = evaluate_schedule(rb, ctx)

    guess = DispatchSchedule(
        p_dg=np.full(24, float(np.clip(7.0, gen.min_power, gen.rated_power))),
        p_bs=np.full(24, min(1.0, ctx.power_limit)),
        soc=np.zeros(25))
    guess.soc = propagate_soc(ctx, guess.p_bs)

    seeds = [rb, guess]
    if initial is not None:
        seeds.append(initial)
    zero = DispatchSchedule(np.zeros(24), np.zeros(24), propagate_soc(ctx, np.zeros(24)))
    seeds.append(zero)

    evaluated = {}

    def solve_pattern(pattern: np.ndarray, base: DispatchSchedule):
        key = tuple(int(b) for b in pattern)
        if key in evaluated:
            return evaluated[key]
        refined, ev = _refine_continuous(_apply_pattern(base, pattern, ctx),
                                         ctx, sweeps=inner_sweeps)
        evaluated[key] = (refined, ev)
        return refined, ev

    best_s, best_ev = None, None
    budget = max_patterns
    for cand in seeds:
        pattern = (cand.p_dg > CONSTRAINT_TOL).astype(int)
        s, ev = solve_pattern(pattern, cand)
        budget -= 1
        if _better(ev, best_ev):
            best_s, best_ev = s, ev

    # hill-climb on the ON/OFF pattern from the incumbent
    improved = True
    while improved and budget > 0:
        improved = False
        base_pattern = (best_s.p_dg > CONSTRAINT_TOL).astype(int)
        for t in rng.permutation(24):
            if budget <= 0:
                break
            flipped = base_pattern.copy()
            flipped[t] = 1 - flipped[t]
            s, ev = solve_pattern(flipped, best_s)
            budget -= 1
            if _better(ev, best_ev):
                best_s, best_ev = s, ev
                base_pattern = flipped
                improved = True

    feasible = best_ev.feasible
    msg = "" if feasible else (
        "no schedule satisfied all hard constraints; returning best found "
        f"with residuals {best_ev.violations}")
    best_s.feasible = feasible
    return DispatchResult(best_s, best_ev, rb, rb_ev, feasible, msg)


def _better(ev: DispatchEvaluation, incumbent: DispatchEvaluation | None) -> bool:
    if incumbent is None:
        return True
    if ev.feasible != incumbent.feasible:
        return ev.feasible
    if ev.feasible:
        return ev.weighted < incumbent.weighted
    return _penalized(ev) < _penalized(incumbent)


# ---------------------------------------------------------------------------
# Scenario suite
# ---------------------------------------------------------------------------

def scenario_scale_climate(day: ClimateSeries, irr_factor: float,
                           wind_factor: float) -> ClimateSeries:
    """Scale the day's irradiance and wind channels (robustness scenarios)."""
    if irr_factor < 0 or wind_factor < 0:
        raise InputDataError("scenario factors must be >= 0")
    return replace(day, irradiance=day.irradiance * irr_factor,
                   wind_speed_ref=day.wind_speed_ref * wind_factor)


@dataclass(frozen=True)
class Scenario:
    name: str
    irr_factor: float = 1.0
    wind_factor: float = 1.0
    load: LoadSeries | None = None


def apply_scenario(ctx: DispatchContext, scenario: Scenario) -> DispatchContext:
    climate = scenario_scale_climate(ctx.climate, scenario.irr_factor,
                                     scenario.wind_factor)
    return DispatchContext(
        design=ctx.design, climate=climate,
        load=scenario.load if scenario.load is not None else ctx.load,
        pv=ctx.pv, wind=ctx.wind, battery=ctx.battery,
        generator=ctx.generator, converter=ctx.converter, costs=ctx.costs,
        fin=ctx.fin, baseline_generator=ctx.baseline_generator,
        weights=ctx.weights, dpsp_max=ctx.dpsp_max,
        soc_start=ctx.soc_start, wt_printed_curve=ctx.wt_printed_curve)


def robustness_suite(ctx: DispatchContext, scenarios: list[Scenario],
                     seed: int = 0, max_patterns: int = 120) -> list[dict]:
    """Re-optimize the day under each scenario; failures are recorded and the
    suite continues."""
    if not scenarios:
        raise InputDataError("at least one scenario required")
    rows = []
    for sc in scenarios:
        row = {"scenario": sc.name}
        try:
            sc_ctx = apply_scenario(ctx, sc)
            result = optimize_day(sc_ctx, seed=seed, max_patterns=max_patterns)
            o = result.evaluation.objectives
            row.update({
                "weighted_obj": result.evaluation.weighted,
                "summary_obj": result.evaluation.summary5,
                "coe_norm": o.lcoe_norm, "em_norm": o.em_norm,
                "dpsp": o.dpsp, "repg": o.repg, "ref": 1.0 - o.one_minus_ref,
                "c_daily": result.evaluation.c_daily,
                "feasible": result.feasible,
            })
        except Exception as exc:  # keep the suite alive per scenario
            row.update({"feasible": False, "error": str(exc)})
        rows.append(row)
    return rows


def suite_to_csv(rows: list[dict], path):
    fields = ["scenario", "weighted_obj", "summary_obj", "coe_norm", "em_norm",
              "dpsp", "repg", "ref", "c_daily", "feasible", "error"]
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n",
                                extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
