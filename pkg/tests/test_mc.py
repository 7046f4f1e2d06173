import numpy as np
import pytest

from alphacir.affine import bond_price, joint_laplace
from alphacir.mc import (
    McEstimate,
    mc_bond,
    mc_counter,
    mc_laplace,
    mc_lou_first_jump_cdf,
    mc_running_min_put,
    mc_survival,
)
from alphacir.jumps import counter_laplace, lou_first_jump_cdf


def test_estimate_within_helper():
    est = McEstimate(value=1.0, std_error=0.1, n_paths=100, estimator="x")
    assert est.within(1.25)
    assert not est.within(1.5)
    assert est.within(1.5, n_se=6.0)


def test_estimate_json():
    est = McEstimate(1.0, 0.1, 100, "x")
    assert est.to_json()["estimator"] == "x"


def test_mc_bond_concordant_at_modest_size(bond_params):
    p = bond_params(alpha=1.5)
    est = mc_bond(p, 1.0, n_paths=20_000, seed=1)
    assert est.within(bond_price(0.0, 1.0, p.r0, p), n_se=4.0)


def test_mc_laplace_concordant(bond_params):
    p = bond_params(alpha=1.2)
    est = mc_laplace(p, 1.0, 1.0, n_paths=20_000, seed=2)
    assert est.within(joint_laplace(p.r0, 1.0, 1.0, 0.0, p), n_se=4.0)


def test_mc_counter_concordant(jump_params):
    p = jump_params(alpha=1.5)
    est = mc_counter(p, 1.0, 0.1, 2.0, n_paths=20_000, seed=3)
    assert est.within(counter_laplace(1.0, 0.1, 2.0, p), n_se=4.0)


def test_mc_survival_grid_alignment(jump_params):
    p = jump_params(alpha=1.5)
    ests = mc_survival(p, 0.1, [1.0, 2.0], n_paths=5000, seed=4)
    assert len(ests) == 2
    assert ests[0].value >= ests[1].value


def test_mc_lou_cdf_concordant(jump_params):
    p = jump_params(alpha=1.5)
    ests = mc_lou_first_jump_cdf(p, 0.1, [1.0], n_paths=20_000, seed=5)
    assert ests[0].within(lou_first_jump_cdf(0.1, 1.0, p), n_se=4.0)


def test_running_min_put_two_forms_identical_paths(bond_params):
    # the yield payoff and the algebraically reduced payoff are the same
    # random variable, so on common paths they agree to rounding
    p = bond_params(alpha=1.5)
    y_form, r_form = mc_running_min_put(p, 0.5, 1.0, 0.039941,
                                        n_paths=2000, dt=1e-3, seed=6)
    assert y_form.value == pytest.approx(r_form.value, rel=1e-10)
    assert y_form.std_error == pytest.approx(r_form.std_error, rel=1e-8)


def test_running_min_put_void_strike(bond_params):
    p = bond_params(alpha=1.5)
    y_form, r_form = mc_running_min_put(p, 0.5, 1.0, 0.005,
                                        n_paths=2000, dt=1e-3, seed=7)
    assert y_form.value == 0.0 and r_form.value == 0.0


def test_mc_bond_rejects_tiny_batch(bond_params):
    with pytest.raises(ValueError):
        mc_bond(bond_params(), 1.0, n_paths=10)
