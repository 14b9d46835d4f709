"""Hourly annual simulation of the islanded microgrid under the
priority-ordered load-following strategy.

All balancing happens on the DC bus: PV feeds it directly, wind and
generator output arrive rectified (eta_rec), demand draws load/eta_inv, and
unserved demand is booked as lost load on the customer (AC) side.  The
per-hour cascade is: renewables serve load, surplus charges the battery,
leftover surplus is dumped, deficits discharge the battery, the generator
covers what remains (semicontinuous between its minimum and rated output),
forced generator surplus recharges the battery when the strategy allows it,
and any final shortfall is lost load.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import economics
from .devices import (BatterySpec, ConverterSpec, GeneratorSpec, PvSpec,
                      WindSpec, battery_power_limit, hub_wind_speed,
                      pv_power, self_discharge_hourly, wt_power)
from .economics import (BaselineMetrics, CostTable, FinancialParams,
                        ObjectiveVector, Weights, weighted_objective)
from .errors import InputDataError
from .timeseries import ClimateSeries, LoadSeries

TRACE_HEADER = ["hour", "p_pv", "p_wt", "p_dg", "p_bs", "soc", "p_dump",
                "p_lost", "load"]


@dataclass(frozen=True)
class Design:
    """Sizing decision: PV and wind unit counts (possibly fractional in
    continuous-capacity mode) plus initial battery energy [kWh]."""

    pv_units: float
    wt_units: float
    e_b_init: float
    integer_counts: bool = True

    def __post_init__(self):
        if self.pv_units < 0 or self.wt_units < 0 or self.e_b_init < 0:
            raise InputDataError("design components must be >= 0")
        if self.integer_counts:
            for name, v in (("pv_units", self.pv_units), ("wt_units", self.wt_units)):
                if abs(v - round(v)) > 1e-9:
                    raise InputDataError(f"{name} must be an integer count, got {v}")

    @classmethod
    def from_counts(cls, n_s: int, n_w: int, e_b_init: float) -> "Design":
        return cls(float(n_s), float(n_w), float(e_b_init), integer_counts=True)

    @classmethod
    def from_capacities(cls, pv_kw: float, wt_kw: float, e_b_init: float,
                        pv: PvSpec, wind: WindSpec) -> "Design":
        return cls(pv_kw / pv.rated_power, wt_kw / wind.rated_power,
                   float(e_b_init), integer_counts=False)

    def pv_kw(self, pv: PvSpec) -> float:
        return self.pv_units * pv.rated_power

    def wt_kw(self, wind: WindSpec) -> float:
        return self.wt_units * wind.rated_power

    def as_vector(self) -> np.ndarray:
        return np.array([self.pv_units, self.wt_units, self.e_b_init])


@dataclass(frozen=True)
class StrategyConfig:
    """Operating strategy toggles for the sizing simulation."""

    dg_may_charge_battery: bool = True
    battery_replacement: str = "cycles"    # "cycles" or "fixed"
    replacement_years: float | None = None  # required for "fixed"
    cycle_counting: str = "reversal"       # "reversal" or "throughput"
    wt_printed_curve: bool = False         # legacy power-curve coefficients

    def __post_init__(self):
        if self.battery_replacement not in ("cycles", "fixed"):
            raise InputDataError("battery_replacement must be 'cycles' or 'fixed'")
        if self.battery_replacement == "fixed" and not self.replacement_years:
            raise InputDataError("fixed battery replacement needs replacement_years")
        if self.cycle_counting not in ("reversal", "throughput"):
            raise InputDataError("cycle_counting must be 'reversal' or 'throughput'")


@dataclass
class SimulationContext:
    """Everything the simulator needs besides the candidate design.

    ``baseline_generator`` is the unit used for LCOE/emission normalization;
    it stays fixed (sized above peak load) even when the dispatch generator
    is swept, so normalized objectives remain comparable across runs.
    """

    climate: ClimateSeries
    load: LoadSeries
    pv: PvSpec
    wind: WindSpec
    battery: BatterySpec
    generator: GeneratorSpec
    converter: ConverterSpec
    costs: CostTable
    fin: FinancialParams
    strategy: StrategyConfig
    baseline_generator: GeneratorSpec | None = None

    def __post_init__(self):
        if self.baseline_generator is None:
            self.baseline_generator = self.generator

    @cached_property
    def baseline(self) -> BaselineMetrics:
        return economics.baseline_metrics(self.load, self.baseline_generator,
                                          self.costs, self.fin)


@dataclass(frozen=True)
class CostBreakdown:
    capital_pv: float
    capital_wt: float
    capital_bs: float
    capital_dg: float
    capital_converter: float
    annual_recurring: float
    pw_recurring: float
    pw_nonrecurring: float
    tnpc: float
    tac: float
    lcoe: float
    baseline_lcoe: float
    baseline_emissions: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class SimResult:
    """Hourly traces plus annual aggregates and the five objectives."""

    p_pv: np.ndarray          # PV output, DC [kW]
    p_wt: np.ndarray          # wind output, AC [kW]
    p_res: np.ndarray         # renewable feed-in on the DC bus [kW]
    p_dg: np.ndarray          # generator output, AC [kW]
    p_bs: np.ndarray          # battery power, +discharge/-charge, DC [kW]
    soc: np.ndarray           # state of charge [fraction]
    p_dump: np.ndarray        # curtailed power, DC [kW]
    p_lost: np.ndarray        # unserved load, AC [kW]
    load: np.ndarray          # demand, AC [kW]
    dg_online_hours: int
    dg_starts: int
    dg_stops: int
    battery_cycles: float
    dg_energy_kwh: float
    res_energy_kwh: float
    dump_kwh: float
    lost_kwh: float
    load_kwh: float
    objectives: ObjectiveVector
    cost: CostBreakdown
    emissions_kg: float

    @property
    def n_hours(self) -> int:
        return len(self.load)

    def write_trace_csv(self, path):
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for h in range(self.n_hours):
                writer.writerow([
                    h,
                    f"{self.p_pv[h]:.6f}", f"{self.p_wt[h]:.6f}",
                    f"{self.p_dg[h]:.6f}", f"{self.p_bs[h]:.6f}",
                    f"{self.soc[h]:.6f}", f"{self.p_dump[h]:.6f}",
                    f"{self.p_lost[h]:.6f}", f"{self.load[h]:.6f}",
                ])


def renewable_feed_in(design: Design, climate: ClimateSeries,
                      pv: PvSpec, wind: WindSpec, converter: ConverterSpec,
                      printed_curve: bool = False):
    """Per-hour PV (DC), wind (AC) and combined DC-bus renewable power."""
    p_pv = np.atleast_1d(pv_power(design.pv_units, climate.irradiance,
                                  climate.temp_ambient, pv))
    v_hub = hub_wind_speed(climate.wind_speed_ref, climate.ref_height, wind)
    p_wt = np.atleast_1d(wt_power(design.wt_units, v_hub, wind,
                                  printed_form=printed_curve))
    res_dc = p_pv + converter.eta_rec * p_wt
    return p_pv, p_wt, res_dc


def dispatch_cascade(res_dc, demand_dc, battery: BatterySpec, e_b_init: float,
                     generator: GeneratorSpec, dg_may_charge: bool,
                     eta_rec: float, soc_start: float | None = None,
                     cycles_start: float = 0.0,
                     cycle_counting: str = "reversal"):
    """Run the load-following priority cascade over any horizon.

    ``res_dc`` and ``demand_dc`` are DC-bus quantities; the generator output
    is AC and contributes ``eta_rec`` of it to the bus.  Returns per-hour
    lists (p_dg, p_bs, soc, dump_dc, lost_dc) plus the final (soc, cycles)
    state, so a caller can chain day slices.
    """
    n = len(res_dc)
    res = list(res_dc)
    dem = list(demand_dc)

    eta = battery.round_trip_eff
    soc_min = battery.soc_min
    soc_max = battery.soc_max
    leak = self_discharge_hourly(battery)
    fade = battery.fade_per_cycle
    has_battery = e_b_init > 0
    soc = soc_max if soc_start is None else soc_start
    cycles = cycles_start
    last_dir = -1  # starts fully charged, so the first discharge is a cycle
    throughput = 0.0

    p_rated = generator.rated_power
    p_min = generator.min_power
    dg_eff = eta_rec

    p_dg_l = [0.0] * n
    p_bs_l = [0.0] * n
    soc_l = [0.0] * n
    dump_l = [0.0] * n
    lost_l = [0.0] * n

    for t in range(n):
        r = res[t]
        d = dem[t]
        p_dg = 0.0
        p_bs = 0.0
        dump = 0.0
        lost_dc = 0.0

        if has_battery:
            e_c = e_b_init * (1.0 - cycles * fade)
            floor = 0.70 * e_b_init
            if e_c < floor:
                e_c = floor
            p_lim = battery_power_limit(e_c, battery)
            s = (1.0 - leak) * soc
            if s < soc_min:
                s = soc_min
        else:
            e_c = 0.0
            p_lim = 0.0
            s = soc

        if r >= d:
            surplus = r - d
            if has_battery and surplus > 0.0:
                room = (soc_max - s) * e_c / eta
                p_ch = min(surplus, p_lim, room)
                if p_ch > 0.0:
                    p_bs = -p_ch
                    surplus -= p_ch
            dump = surplus
        else:
            deficit = d - r
            if has_battery:
                avail = (s - soc_min) * e_c / eta
                p_dis = min(deficit, p_lim, avail)
                if p_dis > 0.0:
                    p_bs = p_dis
                    deficit -= p_dis
            if deficit > 1e-9 and p_rated > 0.0:
                want = deficit / dg_eff
                if want < p_min:
                    want = p_min
                if want > p_rated:
                    want = p_rated
                p_dg = want
                extra = dg_eff * p_dg - deficit
                if extra > 0.0:
                    deficit = 0.0
                    if dg_may_charge and has_battery:
                        soc_now = s - p_bs * eta / e_c
                        room = (soc_max - soc_now) * e_c / eta
                        ch = min(extra, room, p_bs + p_lim)
                        if ch > 0.0:
                            p_bs -= ch
                            extra -= ch
                    dump = extra
                else:
                    deficit = -extra
            lost_dc = deficit if deficit > 1e-12 else 0.0

        if has_battery:
            soc = s - p_bs * eta / e_c
            if soc > soc_max:
                soc = soc_max
            elif soc < soc_min:
                soc = soc_min
            if p_bs > 1e-9:
                throughput += p_bs
                if last_dir < 0 and cycle_counting == "reversal":
                    cycles += 1
                last_dir = 1
            elif p_bs < -1e-9:
                last_dir = -1
            if cycle_counting == "throughput":
                cycles = throughput * eta / e_c

        p_dg_l[t] = p_dg
        p_bs_l[t] = p_bs
        soc_l[t] = soc
        dump_l[t] = dump
        lost_l[t] = lost_dc

    return p_dg_l, p_bs_l, soc_l, dump_l, lost_l, soc, cycles


def count_transitions(online) -> tuple[int, int]:
    """Startup/shutdown counts for an on/off trace.

    The unit starts the horizon off, and a final shutdown is charged when it
    is still online in the last hour (the horizon ends with the unit off).
    """
    online = np.asarray(online, dtype=bool)
    if online.size == 0:
        return 0, 0
    starts = int(np.count_nonzero(online[1:] & ~online[:-1])) + int(online[0])
    stops = int(np.count_nonzero(~online[1:] & online[:-1])) + int(online[-1])
    return starts, stops


def simulate_year(design: Design, ctx: SimulationContext) -> SimResult:
    """Simulate one year (8760 h) and compute objectives and lifecycle costs."""
    climate, load = ctx.climate, ctx.load
    if climate.n_hours != len(load):
        raise InputDataError("climate and load horizons differ")
    if climate.n_hours != 8760:
        raise InputDataError("annual simulation needs 8760 hourly records")
    if climate.has_missing():
        raise InputDataError("climate series has missing values; fill gaps first")
    if np.isnan(load.demand).any():
        raise InputDataError("load series has missing values")

    p_pv, p_wt, res_dc = renewable_feed_in(
        design, climate, ctx.pv, ctx.wind, ctx.converter,
        printed_curve=ctx.strategy.wt_printed_curve)
    demand_dc = load.demand / ctx.converter.eta_inv

    p_dg, p_bs, soc, dump, lost_dc, _, cycles = dispatch_cascade(
        res_dc.tolist(), demand_dc.tolist(), ctx.battery, design.e_b_init,
        ctx.generator, ctx.strategy.dg_may_charge_battery,
        eta_rec=ctx.converter.eta_rec,
        cycle_counting=ctx.strategy.cycle_counting)

    p_dg = np.array(p_dg)
    p_bs = np.array(p_bs)
    soc = np.array(soc)
    dump = np.array(dump)
    lost_ac = np.array(lost_dc) * ctx.converter.eta_inv

    online = p_dg > 0
    starts, stops = count_transitions(online)

    dg_energy = float(p_dg.sum())
    res_energy = float(res_dc.sum())
    gen_energy = res_energy + ctx.converter.eta_rec * dg_energy
    dump_kwh = float(dump.sum())
    lost_kwh = float(lost_ac.sum())
    load_kwh = float(load.demand.sum())

    objectives, cost, emissions = _economics_summary(
        design, ctx, dg_energy, res_energy, gen_energy, dump_kwh, lost_kwh,
        load_kwh, int(online.sum()), starts, stops, cycles)

    return SimResult(
        p_pv=p_pv, p_wt=p_wt, p_res=res_dc, p_dg=p_dg, p_bs=p_bs, soc=soc,
        p_dump=dump, p_lost=lost_ac, load=load.demand.copy(),
        dg_online_hours=int(online.sum()), dg_starts=starts, dg_stops=stops,
        battery_cycles=cycles, dg_energy_kwh=dg_energy,
        res_energy_kwh=res_energy, dump_kwh=dump_kwh, lost_kwh=lost_kwh,
        load_kwh=load_kwh, objectives=objectives, cost=cost,
        emissions_kg=emissions,
    )


def _economics_summary(design, ctx, dg_energy, res_energy, gen_energy,
                       dump_kwh, lost_kwh, load_kwh, online_hours, starts,
                       stops, cycles):
    costs, fin, gen = ctx.costs, ctx.fin, ctx.generator
    capital = economics.initial_capital(
        design.pv_kw(ctx.pv), design.wt_kw(ctx.wind), design.e_b_init,
        gen.rated_power, costs, include_converter=True)
    c_rec = economics.annual_recurring(
        capital, gen, costs, dg_energy, online_hours, starts, stops)

    if ctx.strategy.battery_replacement == "fixed":
        bs_period = ctx.strategy.replacement_years
    else:
        bs_period = (ctx.battery.lifetime_cycles / cycles) if cycles > 0 else math.inf
    dg_period = (gen.lifetime_hours / online_hours) if online_hours > 0 else math.inf

    pw_rec = economics.pw_recurring(c_rec, fin)
    pw_nonrec = (
        economics.pw_nonrecurring(costs.bs_replacement_fraction * capital.bs, fin, bs_period)
        + economics.pw_nonrecurring(costs.dg_replacement_fraction * capital.dg, fin, dg_period))
    tnpc = capital.total + pw_rec + pw_nonrec
    crf_value = economics.crf(economics.real_rate(fin), fin.system_lifetime)
    tac = tnpc * crf_value
    lcoe_value = economics.lcoe(tnpc, crf_value, load_kwh)
    emissions = economics.emissions_total(dg_energy, gen)

    baseline = ctx.baseline
    objectives = ObjectiveVector(
        lcoe_norm=lcoe_value / baseline.lcoe,
        em_norm=emissions / baseline.emissions,
        dpsp=economics.metrics_dpsp(lost_kwh, load_kwh),
        repg=economics.metrics_repg(dump_kwh, gen_energy),
        one_minus_ref=1.0 - economics.metrics_ref(res_energy, gen_energy),
    )
    cost = CostBreakdown(
        capital_pv=capital.pv, capital_wt=capital.wt, capital_bs=capital.bs,
        capital_dg=capital.dg, capital_converter=capital.converter,
        annual_recurring=c_rec, pw_recurring=pw_rec,
        pw_nonrecurring=pw_nonrec, tnpc=tnpc, tac=tac, lcoe=lcoe_value,
        baseline_lcoe=baseline.lcoe, baseline_emissions=baseline.emissions,
    )
    return objectives, cost, emissions


def sizing_objective(design: Design, ctx: SimulationContext,
                     weights: Weights) -> float:
    """Weighted scalar objective of a candidate design (lower is better)."""
    sim = simulate_year(design, ctx)
    return weighted_objective(sim.objectives, weights)


def hourly_power_balance_check(sim: SimResult, converter: ConverterSpec,
                               tol: float = 1e-6):
    """Verify the DC-bus balance every hour:
    p_res + eta_rec*p_dg + p_bs - load/eta_inv - p_dump + p_lost/eta_inv = 0.

    Returns (ok, bad_hours)."""
    residual = (sim.p_res + converter.eta_rec * sim.p_dg + sim.p_bs
                - sim.load / converter.eta_inv - sim.p_dump
                + sim.p_lost / converter.eta_inv)
    bad = np.nonzero(np.abs(residual) > tol)[0]
    return bad.size == 0, bad.tolist()
