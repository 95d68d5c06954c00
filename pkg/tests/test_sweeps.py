import math

import numpy as np
import pytest

from ffwm import search, sweeps


def test_symmetric_budget_split():
    assert sweeps.split_budget(15.2) == pytest.approx((7.6, 7.6))


def test_asymmetric_budget_split_keeps_geometric_mean():
    power_a, power_b = sweeps.split_budget(15.2, ratio=4)
    assert power_a == pytest.approx(15.2)
    assert power_b == pytest.approx(3.8)
    assert 2 * math.sqrt(power_a * power_b) == pytest.approx(15.2)


def test_negative_budget_is_rejected():
    with pytest.raises(ValueError):
        sweeps.split_budget(-1)


def test_zero_budget_point(device):
    row = sweeps.evaluate_point(device, 1e5, 0.48, 0.0)
    assert row.coupling == 0
    assert row.idler == pytest.approx(0, abs=1e-12)
    assert row.flag == ''


def test_sweep_rows_follow_grid_order(device):
    spec = sweeps.SweepSpec(q_values=(1e4, 1e5), zpl_fractions=(0.1, 0.48), budgets=(0.5, 5.0, 50.0), context=device)
    rows = sweeps.sweep(spec)
    assert [(row.q_bar, row.zpl_fraction, row.budget) for row in rows] == spec.points
    assert spec.points[0] == (1e4, 0.1, 0.5)
    assert spec.points[-1] == (1e5, 0.48, 50.0)


def test_threaded_sweep_matches_serial(device):
    spec = sweeps.SweepSpec(q_values=(1e4, 1e5), zpl_fractions=(0.48, 1.0),
                            budgets=sweeps.SweepSpec.logarithmic_budgets(0.1, 100, 7), context=device)
    assert sweeps.sweep(spec, threads=4) == sweeps.sweep(spec, threads=1)


def test_single_point_sweep(device):
    spec = sweeps.SweepSpec(q_values=(1e5,), zpl_fractions=(0.48,), budgets=(15.2,), context=device)
    rows = sweeps.sweep(spec)
    assert len(rows) == 1
    assert 0 < rows[0].idler <= rows[0].beta <= 1


@pytest.mark.parametrize('kwds', [dict(q_values=(1e5, 1e4)), dict(zpl_fractions=(1.5,)), dict(budgets=(1.0, 2e4)),
                                  dict(budgets=())])
def test_sweep_spec_validation(kwds, device):
    arguments = dict(q_values=(1e5,), zpl_fractions=(0.48,), budgets=(1.0,), context=device)
    arguments.update(kwds)
    with pytest.raises(ValueError):
        sweeps.SweepSpec(**arguments)


def test_idler_efficiency_has_one_maximum_in_budget(device):
    spec = sweeps.SweepSpec(q_values=(1e5,), zpl_fractions=(0.48,),
                            budgets=sweeps.SweepSpec.logarithmic_budgets(1e-2, 1e3, 41), context=device)
    rows = sweeps.sweep(spec)
    idler = np.array([row.idler for row in rows])
    beta = np.array([row.beta for row in rows])
    assert len(search.local_maxima(idler)) == 1
    assert np.all(idler <= beta)


def test_saturation_of_reference_device(device):
    result = sweeps.find_saturation(1e5, 0.48, device)
    assert not result.at_boundary
    assert result.eta_star == pytest.approx(0.9125, abs=5e-3)
    assert 2 < result.p_star < 6
    assert result.beta_star >= result.eta_star
    budgets = np.logspace(-1, 2, 31)
    grid = [sweeps.evaluate_point(device, 1e5, 0.48, budget).idler for budget in budgets]
    assert result.eta_star >= max(grid) - 1e-6


def test_beta_falls_above_saturation(device):
    result = sweeps.find_saturation(1e5, 0.48, device)
    budgets = result.p_star * np.logspace(0.05, 2, 15)
    beta = [sweeps.evaluate_point(device, 1e5, 0.48, budget).beta for budget in budgets]
    assert np.all(np.diff(beta) <= 1e-12)


def test_perfect_emitter_saturates_at_budget_limit(device):
    # Without emitter loss beta is 1 at every budget, so more pump only shifts signal loss into the idler.
    result = sweeps.find_saturation(1e5, 1.0, device)
    assert result.at_boundary
    assert result.p_star == pytest.approx(result.p_max)
    assert result.beta_star == pytest.approx(1, abs=1e-9)
    assert result.eta_star == pytest.approx(1, abs=1e-4)
    budgets = np.logspace(-2, 4, 25)
    idler = [sweeps.evaluate_point(device, 1e5, 1.0, budget).idler for budget in budgets]
    assert np.all(np.diff(idler) >= -1e-9)


def test_beta_falls_with_budget_when_signal_loss_dominates(device):
    # Below Q = 2e4 the bare signal loss already exceeds 2 g_e, so extra damping of the signal only lowers beta.
    budgets = sweeps.SweepSpec.logarithmic_budgets(1e-2, 1e2, 33)
    for q_bar in (1e3, 1e4):
        rows = sweeps.sweep(sweeps.SweepSpec(q_values=(q_bar,), zpl_fractions=(0.48,), budgets=budgets, context=device))
        beta = np.array([row.beta for row in rows])
        assert np.all(np.diff(beta) <= 1e-12)
        assert beta[-1] < beta[0]


def test_beta_peaks_then_falls_with_budget_in_strong_coupling(device):
    # At Q = 1e5 the bare signal loss is below 2 g_e: beta rises while conversion damps the signal towards 2 g_e.
    budgets = sweeps.SweepSpec.logarithmic_budgets(1e-2, 1e3, 41)
    rows = sweeps.sweep(sweeps.SweepSpec(q_values=(1e5,), zpl_fractions=(0.48,), budgets=budgets, context=device))
    beta = np.array([row.beta for row in rows])
    peak = int(np.argmax(beta))
    assert 0 < peak < len(beta) - 1
    assert beta[peak] > beta[0] + 0.01
    assert np.all(np.diff(beta[:peak + 1]) >= -1e-12)
    assert np.all(np.diff(beta[peak:]) <= 1e-12)


def test_saturated_efficiency_grows_with_q(device):
    results = sweeps.saturation_grid((1e3, 1e4, 1e5, 1e6), (0.48,), device, points=30)
    eta = [result.eta_star for result in results]
    assert [result.q_bar for result in results] == [1e3, 1e4, 1e5, 1e6]
    assert np.all(np.diff(eta) >= -1e-6)


def test_saturated_efficiency_grows_with_zpl_fraction(device):
    results = sweeps.saturation_grid((1e5,), (0.04, 0.1, 0.48, 1.0), device, points=30, threads=2)
    eta = [result.eta_star for result in results]
    assert np.all(np.diff(eta) >= -1e-6)


def test_loss_ratio_at_saturation_falls_with_q(device):
    results = sweeps.saturation_grid((1e3, 1e4, 1e5, 1e6), (0.48,), device, points=30)
    ratios = [sweeps.saturation_loss_ratio(result) for result in results]
    assert all(0 < ratio < 1 for ratio in ratios)
    assert np.all(np.diff(ratios) < 0)
    assert ratios[2] == pytest.approx(0.1196, abs=2e-3)
    assert sweeps.saturation_loss_ratio(results[2], 0.21) == pytest.approx(0.0588, abs=2e-3)


def test_saturation_loss_ratio_is_undefined_at_unit_efficiency():
    result = sweeps.SaturationResult(q_bar=1e5, zpl_fraction=1.0, p_star=1e4, eta_star=1.0, beta_star=1.0, p_max=1e4)
    assert sweeps.saturation_loss_ratio(result, 1.0) is None
    assert sweeps.saturation_loss_ratio(result) == 0


def test_loss_ratio():
    assert sweeps.loss_ratio(0.95, 0.5) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        sweeps.loss_ratio(0.95, 1.0)


@pytest.mark.parametrize('idler, spatial, expected', [(0.853, 0.21, 0.18), (0.853, 0.66, 0.56), (0.953, 0.66, 0.63)])
def test_headline_efficiencies(idler, spatial, expected):
    assert sweeps.total_efficiency(idler, spatial) == pytest.approx(expected, abs=5e-3)


def test_total_efficiency_rejects_non_probabilities():
    with pytest.raises(ValueError):
        sweeps.total_efficiency(1.2, 0.5)


def test_saturation_result_validation():
    with pytest.raises(ValueError):
        sweeps.SaturationResult(q_bar=1e5, zpl_fraction=0.48, p_star=1.0, eta_star=0.9, beta_star=0.8, p_max=10)
    with pytest.raises(ValueError):
        sweeps.SaturationResult(q_bar=1e5, zpl_fraction=0.48, p_star=20.0, eta_star=0.5, beta_star=0.8, p_max=10)
