import json

import numpy as np
import pytest

from alphacir.sim import (
    Path,
    ROOT_EULER,
    SimConfig,
    THINNED,
    first_large_jump,
    simulate_hawkes,
    simulate_hawkes_batch,
    simulate_lou,
    simulate_root,
    simulate_root_batch,
    simulate_thinned,
    simulate_thinned_batch,
    write_sidecar,
)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=-1e-3)
    with pytest.raises(ValueError):
        SimConfig(scheme="exact")
    with pytest.raises(ValueError):
        SimConfig(scheme=THINNED)  # missing threshold


def test_root_path_shape_and_positivity(bond_params):
    p = bond_params(alpha=1.5)
    config = SimConfig(dt=1e-3, horizon=2.0, seed=4)
    path = simulate_root(p, config)
    assert path.times.shape == path.values.shape == (2001,)
    assert path.values[0] == p.r0
    assert np.all(path.values >= 0.0)


def test_root_scheme_deterministic_given_seed(bond_params):
    p = bond_params(alpha=1.2)
    config = SimConfig(dt=1e-3, horizon=1.0, seed=9)
    a = simulate_root(p, config)
    b = simulate_root(p, config)
    np.testing.assert_array_equal(a.values, b.values)


def test_root_batch_antithetic_pairs_gaussian_only(bond_params):
    # antithetic batches still average to the same law; just check shape
    # bookkeeping and that the two half-batches differ
    p = bond_params(alpha=2.0, sigma_z=0.0)
    rng = np.random.default_rng(0)
    r, integ = simulate_root_batch(p, 1e-3, 1.0, 2000, rng, antithetic=True)
    assert r.shape == integ.shape == (2000,)
    assert not np.allclose(r[:1000], r[1000:])


def test_thinned_records_events_above_threshold(jump_params):
    p = jump_params(alpha=1.2)
    config = SimConfig(dt=1e-3, horizon=20.0, scheme=THINNED, y=0.5, seed=21)
    path = simulate_thinned(p, config)
    assert np.all(path.values >= 0.0)
    for t, size in path.events:
        assert 0.0 < t <= 20.0
        assert size > p.sigma_z * 0.5


def test_first_large_jump_helper():
    path = Path(times=np.arange(3.0), values=np.zeros(3),
                events=[(1.5, 0.2), (0.7, 0.4)])
    assert first_large_jump(path) == 0.7
    assert first_large_jump(Path(np.arange(3.0), np.zeros(3))) is None


def test_thinned_batch_first_event_consistent(jump_params):
    p = jump_params(alpha=1.5)
    rng = np.random.default_rng(3)
    r, integ, first, n_ev = simulate_thinned_batch(p, 1.0, 2e-3, 5.0, 4000,
                                                   rng)
    hit = np.isfinite(first)
    assert np.all(first[hit] <= 5.0)
    assert np.all(n_ev[hit] >= 1)
    assert np.all(n_ev[~hit] == 0)


def test_lou_intensity_not_clamped_at_zero(jump_params):
    # the frozen-coefficient comparison process may go negative; it must not
    # be clipped, that is the point of the comparison
    p = jump_params(alpha=1.5)
    config = SimConfig(dt=1e-3, horizon=30.0, seed=2, y=1.0)
    path = simulate_lou(p, config)
    assert path.values.min() < 0.0


def test_hawkes_rescaled_mean_near_limit():
    rng = np.random.default_rng(8)
    lam = simulate_hawkes_batch(0.1, 0.3, 0.3, 1.0, 50, 20_000, rng)
    target = 0.3 * (1.0 - np.exp(-0.1))
    se = lam.std(ddof=1) / np.sqrt(lam.size)
    assert abs(lam.mean() - target) < 4.0 * se


def test_hawkes_single_path_grid():
    path = simulate_hawkes(0.1, 0.3, 0.3, 1.0, n=10, seed=5)
    assert path.times[0] == 0.0
    assert path.times[-1] == pytest.approx(1.0)
    assert np.all(path.values >= 0.0)


def test_sidecar_schema(tmp_path, bond_params):
    out = tmp_path / "run.json"
    write_sidecar(out, "bond", bond_params(), {"tmax": 10.0}, 7, 0.5, "0.1.0")
    doc = json.loads(out.read_text())
    assert set(doc) == {"command", "params", "config", "seed", "version",
                        "wall_time_s"}
    assert doc["params"]["alpha"] == 1.5


def test_path_csv_round_trip(tmp_path):
    path = Path(times=np.array([0.0, 0.5]), values=np.array([0.1, 0.2]))
    f = tmp_path / "p.csv"
    path.to_csv(f)
    arr = np.loadtxt(f, delimiter=",", skiprows=1)
    np.testing.assert_allclose(arr[:, 1], path.values)
