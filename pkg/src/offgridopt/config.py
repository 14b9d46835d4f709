"""Run configuration: a YAML file with explicit units in the key names.

An empty file (or missing sections) resolves to the case-study defaults:
the bundled climate/load dataset, the 255 Wp PV module, the 3.5 kW turbine,
Li-ion storage with a 16 kW diesel backup, the default cost table and
financial parameters, strategy "generator may charge the battery +
cycle-count replacement", and equal objective weights.  Unknown keys are
rejected by name; all nested invariants are validated on load.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import yaml

from . import datasets
from .devices import (BatterySpec, ConverterSpec, GeneratorSpec, PvSpec,
                      WindSpec, lead_acid_spec, microturbine_spec)
from .economics import CostTable, FinancialParams, Weights, microturbine_costs
from .errors import ConfigError, InputDataError
from .seeding import substream_seed
from .simulate import SimulationContext, StrategyConfig
from .solvers import SearchSpace
from .timeseries import (generate_annual_load, read_climate_csv,
                         read_load_csv, scale_wind)

SCHEMA_VERSION = 1

# config key (with units) -> dataclass field, per section
_PV_KEYS = {
    "eta_ref_fraction": "eta_ref",
    "eta_pc_fraction": "eta_pc",
    "temp_ref_c": "temp_ref",
    "irr_noct_kw_per_m2": "irr_noct",
    "temp_cell_noct_c": "temp_cell_noct",
    "temp_amb_noct_c": "temp_amb_noct",
    "beta_per_c": "beta",
    "rated_power_kw": "rated_power",
    "collector_area_m2": "collector_area",
}
_WIND_KEYS = {
    "hub_height_m": "hub_height",
    "rated_power_kw": "rated_power",
    "cut_in_ms": "cut_in",
    "rated_speed_ms": "rated_speed",
    "cut_out_ms": "cut_out",
    "shear_exponent": "shear_exponent",
}
_BATTERY_KEYS = {
    "chemistry": "chemistry",
    "soc_min_fraction": "soc_min",
    "soc_max_fraction": "soc_max",
    "self_discharge_per_month": "self_discharge_monthly",
    "round_trip_eff_fraction": "round_trip_eff",
    "lifetime_years": "lifetime_years",
    "lifetime_cycles": "lifetime_cycles",
    "rated_power_per_unit_kw": "rated_power_per_unit",
    "unit_energy_kwh": "unit_energy",
    "fade_per_cycle_fraction": "fade_per_cycle",
    "fixed_power_limit": "fixed_power_limit",
}
_GENERATOR_KEYS = {
    "kind": "kind",
    "rated_power_kw": "rated_power",
    "min_fraction": "min_fraction",
    "fuel_coeff_a_l_per_kwh": "fuel_coeff_a",
    "fuel_coeff_b_l_per_kwh": "fuel_coeff_b",
    "mt_fuel_slope_mmbtu_per_kwh": "mt_fuel_slope",
    "fuel_price_usd": "fuel_price",    # per gal (DE) or per MMBtu (MT)
    "lifetime_hours": "lifetime_hours",
}
_CONVERTER_KEYS = {
    "eta_inv_fraction": "eta_inv",
    "eta_rec_fraction": "eta_rec",
    "rated_power_kw": "rated_power",
    "capital_cost_usd": "capital_cost",
    "lifetime_years": "lifetime_years",
}
_FINANCIAL_KEYS = {
    "nominal_rate_fraction": "nominal_rate",
    "inflation_fraction": "inflation",
    "system_lifetime_years": "system_lifetime",
    "pv_lifetime_years": "pv_lifetime",
    "wt_lifetime_years": "wt_lifetime",
    "converter_lifetime_years": "converter_lifetime",
}
_COST_KEYS = {
    "pv_capital_usd_per_kw": "pv_capital_per_kw",
    "wt_capital_usd_per_kw": "wt_capital_per_kw",
    "bs_capital_usd_per_kwh": "bs_capital_per_kwh",
    "dg_capital_usd_per_kw": "dg_capital_per_kw",
    "bs_replacement_fraction": "bs_replacement_fraction",
    "dg_replacement_fraction": "dg_replacement_fraction",
    "om_fix_pv_fraction_per_year": "om_fix_pv",
    "om_fix_wt_fraction_per_year": "om_fix_wt",
    "om_fix_bs_fraction_per_year": "om_fix_bs",
    "om_fix_dg_fraction_per_year": "om_fix_dg",
    "om_var_dg_usd_per_hour": "om_var_dg_per_hour",
    "om_var_dg_usd_per_kwh": "om_var_dg_per_kwh",
    "startup_cost_usd": "startup_cost",
    "shutdown_cost_usd": "shutdown_cost",
    "converter_capital_usd": "converter_capital",
}
_STRATEGY_KEYS = {
    "dg_may_charge_battery": "dg_may_charge_battery",
    "battery_replacement": "battery_replacement",
    "replacement_years": "replacement_years",
    "cycle_counting": "cycle_counting",
    "wt_printed_curve": "wt_printed_curve",
}
_DATA_KEYS = ("climate_csv", "load_csv", "wind_correction_factor",
              "load_variation_fraction")
_SIZING_KEYS = ("bounds_lower", "bounds_upper", "integer_counts", "solver",
                "max_evals", "swarm_size", "n_starts", "population")
_DISPATCH_KEYS = ("day", "dpsp_max", "weights", "dg_rated_kw", "max_patterns")
_BASELINE_KEYS = ("dg_rated_kw",)
_BREAKEVEN_KEYS = ("grid_lcoe_usd_per_kwh", "extension_cost_usd_per_km")

_TOP_LEVEL = ("seed", "data", "pv", "wind", "battery", "generator",
              "converter", "financial", "costs", "strategy", "weights",
              "sizing", "dispatch", "baseline", "breakeven")


@dataclass
class RunConfig:
    """Fully resolved configuration: every spec object plus run options."""

    seed: int
    data: dict
    pv: PvSpec
    wind: WindSpec
    battery: BatterySpec
    generator: GeneratorSpec
    converter: ConverterSpec
    fin: FinancialParams
    costs: CostTable
    strategy: StrategyConfig
    weights: Weights
    sizing: dict
    dispatch: dict
    baseline_dg_rated: float
    breakeven: dict

    def search_space(self) -> SearchSpace:
        return SearchSpace(self.sizing["bounds_lower"],
                           self.sizing["bounds_upper"],
                           [self.sizing["integer_counts"]] * 2 + [False])

    def baseline_generator(self) -> GeneratorSpec:
        return dataclasses.replace(self.generator,
                                   rated_power=self.baseline_dg_rated)

    def dispatch_generator(self) -> GeneratorSpec:
        rated = self.dispatch.get("dg_rated_kw")
        if rated is None:
            return self.generator
        return dataclasses.replace(self.generator, rated_power=float(rated))

    def resolved(self) -> dict:
        """Materialize every setting (defaults included) as a plain dict
        using the documented unit-suffixed key names."""
        def block(obj, keys):
            return {k: getattr(obj, f) for k, f in keys.items()}
        return {
            "seed": self.seed,
            "data": dict(self.data),
            "pv": block(self.pv, _PV_KEYS),
            "wind": block(self.wind, _WIND_KEYS),
            "battery": block(self.battery, _BATTERY_KEYS),
            "generator": block(self.generator, _GENERATOR_KEYS),
            "converter": block(self.converter, _CONVERTER_KEYS),
            "financial": block(self.fin, _FINANCIAL_KEYS),
            "costs": block(self.costs, _COST_KEYS),
            "strategy": block(self.strategy, _STRATEGY_KEYS),
            "weights": list(self.weights.values),
            "sizing": dict(self.sizing),
            "dispatch": dict(self.dispatch),
            "baseline": {"dg_rated_kw": self.baseline_dg_rated},
            "breakeven": dict(self.breakeven),
        }


def _check_keys(section: str, mapping: dict, allowed) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key {section}.{key}")


def _build(section, mapping, keys, factory, **preset):
    _check_keys(section, mapping, keys)
    kwargs = dict(preset)
    for key, value in mapping.items():
        kwargs[keys[key]] = value
    try:
        return factory(**kwargs)
    except InputDataError as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def build_config(raw: dict | None) -> RunConfig:
    """Validate a parsed YAML mapping and fill defaults for omitted keys."""
    raw = dict(raw or {})
    for key in raw:
        if key not in _TOP_LEVEL:
            raise ConfigError(f"unknown key {key!r}")

    data = dict(raw.get("data") or {})
    _check_keys("data", data, _DATA_KEYS)
    data.setdefault("climate_csv", None)
    data.setdefault("load_csv", None)
    data.setdefault("wind_correction_factor", datasets.WIND_CORRECTION_FACTOR)
    data.setdefault("load_variation_fraction", 0.20)
    if data["wind_correction_factor"] <= 0:
        raise ConfigError("data.wind_correction_factor must be > 0")
    if not 0 <= data["load_variation_fraction"] < 1:
        raise ConfigError("data.load_variation_fraction must be in [0, 1)")

    pv = _build("pv", dict(raw.get("pv") or {}), _PV_KEYS, PvSpec)
    wind = _build("wind", dict(raw.get("wind") or {}), _WIND_KEYS, WindSpec)

    battery_raw = dict(raw.get("battery") or {})
    chemistry = battery_raw.get("chemistry", "LI")
    battery_factory = BatterySpec if chemistry == "LI" else lead_acid_spec
    battery_raw.pop("chemistry", None)
    battery = _build("battery", battery_raw, _BATTERY_KEYS, battery_factory)

    gen_raw = dict(raw.get("generator") or {})
    kind = gen_raw.get("kind", "DE")
    gen_factory = GeneratorSpec if kind == "DE" else microturbine_spec
    gen_raw.pop("kind", None)
    generator = _build("generator", gen_raw, _GENERATOR_KEYS, gen_factory)

    converter = _build("converter", dict(raw.get("converter") or {}),
                       _CONVERTER_KEYS, ConverterSpec)
    fin = _build("financial", dict(raw.get("financial") or {}),
                 _FINANCIAL_KEYS, FinancialParams)

    cost_raw = dict(raw.get("costs") or {})
    cost_factory = CostTable if kind == "DE" else microturbine_costs
    if chemistry == "LA":
        cost_raw.setdefault("bs_capital_usd_per_kwh", 255.0)
    costs = _build("costs", cost_raw, _COST_KEYS, cost_factory)

    strategy = _build("strategy", dict(raw.get("strategy") or {}),
                      _STRATEGY_KEYS, StrategyConfig)

    weights_raw = raw.get("weights", [0.2] * 5)
    try:
        weights = Weights(tuple(float(v) for v in weights_raw))
    except InputDataError as exc:
        raise ConfigError(f"weights: {exc}") from exc
    if len(weights) != 5:
        raise ConfigError("weights: expected 5 entries")

    sizing = dict(raw.get("sizing") or {})
    _check_keys("sizing", sizing, _SIZING_KEYS)
    sizing.setdefault("bounds_lower", [0.0, 0.0, 0.0])
    sizing.setdefault("bounds_upper", [100.0, 30.0, 200.0])
    sizing.setdefault("integer_counts", True)
    sizing.setdefault("solver", "pso")
    sizing.setdefault("max_evals", 2000)
    sizing.setdefault("swarm_size", 30)
    if len(sizing["bounds_lower"]) != 3 or len(sizing["bounds_upper"]) != 3:
        raise ConfigError("sizing bounds must have 3 entries")

    dispatch = dict(raw.get("dispatch") or {})
    _check_keys("dispatch", dispatch, _DISPATCH_KEYS)
    dispatch.setdefault("day", 0)
    dispatch.setdefault("dpsp_max", 0.01)
    dispatch.setdefault("weights", [0.25] * 4)
    dispatch.setdefault("dg_rated_kw", None)
    dispatch.setdefault("max_patterns", 120)
    try:
        Weights(tuple(dispatch["weights"]))
    except InputDataError as exc:
        raise ConfigError(f"dispatch.weights: {exc}") from exc
    if len(dispatch["weights"]) != 4:
        raise ConfigError("dispatch.weights: expected 4 entries")

    baseline = dict(raw.get("baseline") or {})
    _check_keys("baseline", baseline, _BASELINE_KEYS)
    baseline_dg = float(baseline.get("dg_rated_kw", 16.0))

    breakeven = dict(raw.get("breakeven") or {})
    _check_keys("breakeven", breakeven, _BREAKEVEN_KEYS)
    breakeven.setdefault("grid_lcoe_usd_per_kwh", 0.125)
    breakeven.setdefault("extension_cost_usd_per_km", 157470.0)

    return RunConfig(
        seed=int(raw.get("seed", 0)),
        data=data, pv=pv, wind=wind, battery=battery, generator=generator,
        converter=converter, fin=fin, costs=costs, strategy=strategy,
        weights=weights, sizing=sizing, dispatch=dispatch,
        baseline_dg_rated=baseline_dg, breakeven=breakeven,
    )


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return build_config(raw)


def save_config(config: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config.resolved(), fh, sort_keys=False)


def load_dataset(config: RunConfig, seed: int):
    """Assemble the (climate, annual load) pair a run simulates against."""
    if config.data["climate_csv"]:
        climate = read_climate_csv(config.data["climate_csv"])
        climate = scale_wind(climate, config.data["wind_correction_factor"])
    else:
        climate = datasets.load_bundled_climate(apply_wind_correction=False)
        climate = scale_wind(climate, config.data["wind_correction_factor"])
    if config.data["load_csv"]:
        daily = read_load_csv(config.data["load_csv"])
    else:
        daily = datasets.load_bundled_daily_load()
    load = generate_annual_load(daily, config.data["load_variation_fraction"],
                                substream_seed(seed, "load-gen"))
    return climate, load


def build_context(config: RunConfig, seed: int | None = None) -> SimulationContext:
    """Simulation context for the configured system on the configured data."""
    seed = config.seed if seed is None else seed
    climate, load = load_dataset(config, seed)
    return SimulationContext(
        climate=climate, load=load, pv=config.pv, wind=config.wind,
        battery=config.battery, generator=config.generator,
        converter=config.converter, costs=config.costs, fin=config.fin,
        strategy=config.strategy,
        baseline_generator=config.baseline_generator(),
    )
