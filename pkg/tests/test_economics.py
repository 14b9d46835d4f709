import math

import numpy as np
import pytest

from offgridopt import economics
from offgridopt.devices import GeneratorSpec, microturbine_spec
from offgridopt.economics import (CostTable, FinancialParams, ObjectiveVector,
                                  Weights, adjusted_rate, annual_recurring,
                                  baseline_metrics, break_even_distance, crf,
                                  emission_factor_sum, emissions_total,
                                  equal_weights, fixed_om, initial_capital,
                                  lcoe, metrics_dpsp, metrics_ref,
                                  metrics_repg, pw_nonrecurring, pw_recurring,
                                  real_rate, weighted_objective)
from offgridopt.errors import InfeasibleBaselineError, InputDataError

FIN = FinancialParams()  # i = 9 %, f = 5.7 %, 25 years


# ---------------------------------------------------------------------------
# Discounting
# ---------------------------------------------------------------------------

def test_real_rate_default_and_limits():
    assert real_rate(FIN) == pytest.approx((0.09 - 0.057) / 1.057, rel=1e-12)
    assert real_rate(FIN) == pytest.approx(0.031221, abs=1e-6)
    assert real_rate(FinancialParams(nominal_rate=0.05, inflation=0.05)) == 0.0
    assert real_rate(FinancialParams(nominal_rate=0.03, inflation=0.057)) < 0.0


def test_crf_reference_and_limits():
    assert crf(real_rate(FIN), 25) == pytest.approx(0.0582, abs=1e-4)
    assert crf(0.0, 25) == pytest.approx(1.0 / 25.0)
    assert crf(0.1, 1) == pytest.approx(1.1)
    with pytest.raises(InputDataError):
        crf(-1.5, 10)


def brute_force_pw(cost, i, f, years):
    # independent oracle: explicit year-by-year discounted sum
    return sum(cost * ((1 + f) / (1 + i)) ** k for k in range(1, years + 1))


def test_pw_recurring_matches_explicit_sum():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        i = rng.uniform(-0.05, 0.5)
        f = rng.uniform(-0.05, 0.5)
        fin = FinancialParams(nominal_rate=i, inflation=f)
        got = pw_recurring(1234.5, fin)
        want = brute_force_pw(1234.5, i, f, 25)
        assert got == pytest.approx(want, rel=1e-6)


def test_pw_recurring_equal_rates_limit():
    fin = FinancialParams(nominal_rate=0.07, inflation=0.07)
    assert pw_recurring(1000.0, fin) == pytest.approx(25000.0)
    assert pw_recurring(0.0, FIN) == 0.0


def test_adjusted_rate_values():
    assert adjusted_rate(FIN, 1.0) == pytest.approx(0.09)
    # independent evaluation by repeated multiplication
    num = 1.0
    for _ in range(10):
        num *= 1.09
    den = 1.0
    for _ in range(9):
        den *= 1.057
    assert adjusted_rate(FIN, 10.0) == pytest.approx(num / den - 1.0, rel=1e-12)
    assert adjusted_rate(FIN, 10.0) == pytest.approx(0.437441, abs=1e-6)
    zero = FinancialParams(nominal_rate=0.0, inflation=0.0)
    assert adjusted_rate(zero, 5.0) == pytest.approx(0.0)


def test_pw_nonrecurring_zero_and_limits():
    assert pw_nonrecurring(0.0, FIN, 10.0) == 0.0
    assert pw_nonrecurring(5000.0, FIN, math.inf) == 0.0
    same = FinancialParams(nominal_rate=0.06, inflation=0.06)
    assert pw_nonrecurring(100.0, same, 4.0) == pytest.approx(2500.0)


def test_pw_nonrecurring_against_explicit_schedule_strong_discounting():
    # explicit oracle: one payment at each replacement year L, 2L, ... <= T,
    # escalated with inflation and discounted at the nominal rate.  The
    # closed form annualizes the stream, so agreement requires the tail
    # beyond the horizon to be strongly discounted.
    fin = FinancialParams(nominal_rate=0.20, inflation=0.02)
    L, cost = 3.0, 10000.0
    x = (1 + fin.inflation) / (1 + fin.nominal_rate)
    explicit = sum(cost * x ** (L * k)
                   for k in range(1, int(fin.system_lifetime / L) + 1))
    closed = pw_nonrecurring(cost, fin, L)
    assert closed == pytest.approx(explicit, rel=0.10)


# ---------------------------------------------------------------------------
# Cost aggregation
# ---------------------------------------------------------------------------

def test_initial_capital_zero_system():
    cap = initial_capital(0, 0, 0, 0, CostTable(), include_converter=False)
    assert cap.total == 0.0


def test_initial_capital_reference_system():
    # 15 modules (3.825 kW), 4 turbines (14 kW), 106.53 kWh, 16 kW DG
    cap = initial_capital(3.825, 14.0, 106.53, 16.0, CostTable())
    assert cap.pv == pytest.approx(1210 * 3.825)
    assert cap.wt == pytest.approx(1500 * 14.0)
    assert cap.bs == pytest.approx(300 * 106.53)
    assert cap.dg == pytest.approx(781.25 * 16.0)
    assert cap.converter == pytest.approx(2800.0)
    assert cap.total == pytest.approx(72887.25, abs=0.01)


def test_initial_capital_affine_in_capacities():
    costs = CostTable()
    one = initial_capital(2.0, 7.0, 50.0, 16.0, costs)
    two = initial_capital(4.0, 14.0, 100.0, 32.0, costs)
    assert two.total == pytest.approx(2 * one.total - costs.converter_capital)


def test_annual_recurring_offline_generator_is_fixed_om_only():
    costs = CostTable()
    gen = GeneratorSpec(rated_power=16.0)
    cap = initial_capital(3.825, 14.0, 106.53, 16.0, costs)
    c = annual_recurring(cap, gen, costs, dg_energy_kwh=0.0,
                         dg_online_hours=0, dg_starts=0, dg_stops=0)
    assert c == pytest.approx(fixed_om(cap, costs))


def test_annual_recurring_counts_fuel_om_and_switching():
    costs = CostTable()
    gen = GeneratorSpec(rated_power=16.0)
    cap = initial_capital(0.0, 0.0, 0.0, 16.0, costs, include_converter=False)
    c = annual_recurring(cap, gen, costs, dg_energy_kwh=100.0,
                         dg_online_hours=10, dg_starts=2, dg_stops=2)
    fuel = 3.20 * (0.246 * 100.0 + 0.08145 * 16.0 * 10) / 3.78541
    expected = (0.02 * cap.dg + 0.24 * 10 + fuel + 2 * 0.45 + 2 * 0.23)
    assert c == pytest.approx(expected, rel=1e-12)


def test_lcoe_reference_value_and_scaling():
    crf_value = 0.0582
    tnpc = 17097.0 / crf_value
    assert lcoe(tnpc, crf_value, 74251.0) == pytest.approx(0.2303, abs=1e-4)
    assert lcoe(0.0, crf_value, 74251.0) == 0.0
    assert lcoe(tnpc, crf_value, 2 * 74251.0) == pytest.approx(0.2303 / 2, abs=1e-4)
    with pytest.raises(InputDataError):
        lcoe(tnpc, crf_value, 0.0)


# ---------------------------------------------------------------------------
# Emissions
# ---------------------------------------------------------------------------

def test_emission_factor_sums():
    de = emission_factor_sum(GeneratorSpec())
    mt = emission_factor_sum(microturbine_spec())
    # exact species sums, and the published rounded totals
    assert de == pytest.approx(0.677510, abs=1e-9)
    assert mt == pytest.approx(0.655483, abs=1e-9)
    assert de == pytest.approx(0.6774, abs=2e-4)
    assert mt == pytest.approx(0.6555, abs=2e-4)


def test_emissions_total_linear():
    gen = GeneratorSpec()
    assert emissions_total(0.0, gen) == 0.0
    assert emissions_total(1000.0, gen) == pytest.approx(677.51, rel=1e-9)
    assert emissions_total(2000.0, gen) == pytest.approx(2 * emissions_total(1000.0, gen))


# ---------------------------------------------------------------------------
# Reliability metrics and scalarization
# ---------------------------------------------------------------------------

def test_metrics_definitions():
    assert metrics_dpsp(0.0, 100.0) == 0.0
    assert metrics_ref(0.0, 50.0) == 0.0           # all generation fossil
    assert metrics_repg(1.0, 10.0) == pytest.approx(0.1)
    assert metrics_repg(0.0, 0.0) == 0.0
    assert metrics_ref(0.0, 0.0) == 0.0
    with pytest.raises(InputDataError):
        metrics_dpsp(1.0, 0.0)


def test_weighted_objective_reference_row():
    obj = ObjectiveVector(0.4645, 0.0537, 0.0, 0.1252, 0.0399)
    assert weighted_objective(obj, equal_weights()) == pytest.approx(0.1367, abs=1e-4)
    zeros = ObjectiveVector(0, 0, 0, 0, 0)
    assert weighted_objective(zeros, equal_weights()) == 0.0
    selector = Weights((1.0, 0.0, 0.0, 0.0, 0.0))
    assert weighted_objective(obj, selector) == pytest.approx(0.4645)


def test_weighted_objective_monotone_in_components():
    w = equal_weights()
    base = ObjectiveVector(0.4, 0.1, 0.0, 0.2, 0.1)
    bumped = ObjectiveVector(0.4, 0.1, 0.05, 0.2, 0.1)
    assert weighted_objective(bumped, w) > weighted_objective(base, w)


def test_weights_validation():
    with pytest.raises(InputDataError):
        Weights((0.5, 0.5, 0.5, 0.0, 0.0))
    with pytest.raises(InputDataError):
        Weights((0.5, 0.6, -0.1, 0.0, 0.0))
    with pytest.raises(InputDataError):
        weighted_objective(ObjectiveVector(0, 0, 0, 0, 0), Weights((0.5, 0.5)))


# ---------------------------------------------------------------------------
# Generator-only baseline
# ---------------------------------------------------------------------------

def test_baseline_reference_lcoe(annual_ctx):
    base = baseline_metrics(annual_ctx.load, GeneratorSpec(rated_power=16.0),
                            CostTable(), FIN)
    assert base.lcoe == pytest.approx(0.4968, rel=0.10)
    assert base.emissions == pytest.approx(
        emission_factor_sum(GeneratorSpec()) * annual_ctx.load.total_kwh, rel=1e-12)


def test_baseline_microturbine_emits_less_per_kwh(annual_ctx):
    de = baseline_metrics(annual_ctx.load, GeneratorSpec(rated_power=16.0),
                          CostTable(), FIN)
    mt = baseline_metrics(annual_ctx.load, microturbine_spec(rated_power=16.0),
                          economics.microturbine_costs(), FIN)
    assert mt.emissions_per_kwh < de.emissions_per_kwh


def test_baseline_rejects_undersized_generator(annual_ctx):
    with pytest.raises(InfeasibleBaselineError):
        baseline_metrics(annual_ctx.load, GeneratorSpec(rated_power=8.0),
                         CostTable(), FIN)


# ---------------------------------------------------------------------------
# Break-even distance
# ---------------------------------------------------------------------------

def test_break_even_reference_case():
    bed = break_even_distance(17097.0, 0.0582, 74251.0, 0.125, 157470.0)
    assert bed == pytest.approx(0.853, abs=0.01)


def test_break_even_zero_and_scaling():
    assert break_even_distance(0.125 * 1000.0, 0.06, 1000.0, 0.125, 5000.0) == 0.0
    one = break_even_distance(20000.0, 0.0582, 74251.0, 0.125, 100000.0)
    half = break_even_distance(20000.0, 0.0582, 74251.0, 0.125, 200000.0)
    assert half == pytest.approx(one / 2.0)
