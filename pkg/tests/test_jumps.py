import numpy as np
import pytest

from alphacir.jumps import (
    counter_laplace,
    expected_tau,
    lou_first_jump_cdf,
    survival_curve,
    survival_tau,
    survival_tau_via_rhat,
    tail_asymptotics,
)
from alphacir.stable import big_jump_mass

Y_BAR = 0.1


def test_counter_laplace_degenerate_points(jump_params):
    p = jump_params(alpha=1.5)
    assert counter_laplace(0.0, Y_BAR, 5.0, p) == 1.0
    assert counter_laplace(1.0, Y_BAR, 0.0, p) == 1.0


def test_counter_laplace_decreasing_in_p(jump_params):
    p = jump_params(alpha=1.5)
    vals = [counter_laplace(q, Y_BAR, 5.0, p) for q in (0.0, 0.5, 1.0, 3.0)]
    assert np.all(np.diff(vals) < 0.0)


def test_counter_laplace_large_p_approaches_survival(jump_params):
    # e^{-p N_t} -> 1{N_t = 0} = 1{tau > t} as p grows
    p = jump_params(alpha=1.5)
    surv = survival_tau(Y_BAR, 5.0, p)
    assert counter_laplace(40.0, Y_BAR, 5.0, p) == pytest.approx(surv,
                                                                 rel=1e-4)


def test_survival_two_route_identity(jump_params):
    for alpha in (1.2, 1.5, 1.9):
        p = jump_params(alpha=alpha)
        for t in (1.0, 5.0, 10.0):
            s1 = survival_tau(Y_BAR, t, p)
            s2 = survival_tau_via_rhat(Y_BAR, t, p)
            assert abs(s1 - s2) < 1e-6


def test_survival_curve_monotone_and_bounded(jump_params):
    p = jump_params(alpha=1.5)
    grid = np.linspace(0.0, 30.0, 61)
    curve = survival_curve(Y_BAR, grid, p)
    s = curve.derived
    assert s[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(s) <= 1e-12)
    assert np.all((s >= 0.0) & (s <= 1.0))


def test_expected_tau_routes_agree(jump_params):
    p = jump_params(alpha=1.5)
    est = expected_tau(Y_BAR, p)
    assert est.survival_route == pytest.approx(est.density_route, rel=1e-4)
    assert est.value > 0.0


def test_expected_tau_consistent_with_survival_integral(jump_params):
    # E[tau] = int_0^inf P(tau > t) dt; probe the partial integral at t=30
    p = jump_params(alpha=1.2)
    est = expected_tau(Y_BAR, p)
    grid = np.linspace(0.0, 30.0, 301)
    partial = np.trapz(survival_curve(Y_BAR, grid, p).derived, grid)
    assert partial < est.value


def test_lou_first_jump_cdf_formula(jump_params):
    p = jump_params(alpha=1.5)
    nu = big_jump_mass(p.alpha, Y_BAR / p.sigma_z)
    for t in (0.5, 1.0, 2.0):
        assert lou_first_jump_cdf(Y_BAR, t, p) == pytest.approx(
            1.0 - np.exp(-nu * p.r0 * t), rel=1e-12)


def test_tail_asymptotics_fields(jump_params):
    p = jump_params(alpha=1.5)
    ta = tail_asymptotics(5.0, Y_BAR, p)
    nu = big_jump_mass(p.alpha, Y_BAR / p.sigma_z)
    assert ta.m_lambda == pytest.approx(nu * p.r0 * 5.0, rel=1e-12)
    # the state-fed jump counter sits below the frozen-rate one here because
    # r0 > b, so the rate drifts down from its start
    assert ta.m_r < ta.m_lambda
    assert ta.r_bound >= 0.0


def test_jump_law_requires_jump_component():
    from alphacir.mechanism import ModelParams
    p = ModelParams(a=0.1, b=0.1, sigma=0.1, sigma_z=0.0, alpha=2.0, r0=0.2)
    with pytest.raises(ValueError):
        survival_tau(Y_BAR, 1.0, p)
