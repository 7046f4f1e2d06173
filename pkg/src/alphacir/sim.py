"""Path generation for the jump-extended square-root rate model.

Four engines:

* root Euler: discretizes dr = a(b-r)dt + sigma sqrt(r) dB + sigma_z r^(1/alpha) dZ
  with full truncation (coefficients at r+, then clamp at 0);
* thinned: evolves the truncated dynamics (drift a_tilde(b_tilde - r)) with an
  Asmussen-Rosinski small-jump approximation and superposes the big jumps
  (mark > y) by thinning against a per-step intensity bound; big jumps are
  recorded as events;
* LOU: the locally equivalent Levy-OU benchmark with volatility and jump
  scale frozen at r0 (no clamp, Vasicek-type);
* Hawkes: exact event-driven simulation of the exponential-kernel
  self-exciting intensity whose rescaling converges to the diffusion limit.

Batch functions return arrays over paths and drive everything from one
Generator; the single-path wrappers return Path objects for the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .mechanism import ModelParams, truncated_drift, truncated_level
from .stable import (
    StableSpec,
    big_jump_mass,
    levy_density_coefficient,
    sample_stable_increment,
    sample_truncated_band,
    truncated_second_moment,
    _check_alpha,
)

ROOT_EULER = "root_euler"
THINNED = "thinned"


@dataclass
class SimConfig:
    """Discretization and scheme choice.

    dt: step in years; horizon: total length; scheme: root_euler | thinned;
    y: mark-space truncation threshold for the thinned scheme (rate-space
    recording threshold is sigma_z * y); seed feeds a PCG64 stream.
    """

    dt: float = 1e-3
    horizon: float = 1.0
    scheme: str = ROOT_EULER
    y: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0.0 or self.horizon < self.dt:
            raise ValueError("need dt > 0 and horizon >= dt")
        if self.scheme not in (ROOT_EULER, THINNED):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == THINNED and (self.y is None or self.y <= 0.0):
            raise ValueError("thinned scheme needs y > 0")

    def to_json(self) -> dict:
        return {"dt": self.dt, "horizon": self.horizon, "scheme": self.scheme,
                "y": self.y, "seed": self.seed}


@dataclass
class Path:
    """One trajectory on a uniform grid plus recorded large-jump events."""

    times: np.ndarray
    values: np.ndarray
    events: list = field(default_factory=list)   # (time, size in rate units)

    def to_csv(self, path) -> None:
        arr = np.column_stack([self.times, self.values])
        np.savetxt(path, arr, delimiter=",", header="t,r", comments="")

    def events_to_csv(self, path) -> None:
        arr = np.array(self.events, dtype=float).reshape(-1, 2)
        np.savetxt(path, arr, delimiter=",", header="t,size", comments="")


def first_large_jump(path: Path) -> Optional[float]:
    """Earliest recorded event time, or None when no event occurred."""
    if not path.events:
        return None
    return min(t for t, _ in path.events)


def _grid(dt: float, horizon: float):
    n_steps = int(round(horizon / dt))
    return n_steps, dt * np.arange(n_steps + 1)


def simulate_root_batch(params: ModelParams, dt: float, horizon: float,
                        n_paths: int, rng: np.random.Generator,
                        antithetic: bool = False,
                        keep_paths: bool = False):
    """Full-truncation Euler for the root representation; returns terminal
    values, the trapezoid integral of r over [0, horizon], and optionally the
    full (n_paths, n_steps+1) array.

    With antithetic=True the Gaussian driver of the second half of the batch
    mirrors the first half (n_paths must be even); the stable increments are
    drawn independently, only the Brownian component is paired.
    """
    n_steps, times = _grid(dt, horizon)
    if antithetic and n_paths % 2:
        raise ValueError("antithetic batches need an even n_paths")
    spec = StableSpec(params.alpha)
    r = np.full(n_paths, params.r0)
    integral = np.zeros(n_paths)
    out = np.empty((n_paths, n_steps + 1)) if keep_paths else None
    if keep_paths:
        out[:, 0] = r
    sqrt_dt = np.sqrt(dt)
    half = n_paths // 2
    for k in range(n_steps):
        rp = np.maximum(r, 0.0)
        if antithetic:
            g = rng.standard_normal(half)
            gauss = np.concatenate([g, -g])
        else:
            gauss = rng.standard_normal(n_paths)
        dz = sample_stable_increment(spec, dt, rng, size=n_paths)
        r_new = (r + params.a * (params.b - rp) * dt
                 + params.sigma * np.sqrt(rp) * sqrt_dt * gauss)
        if params.sigma_z > 0.0 and params.alpha < 2.0:
            r_new += params.sigma_z * rp ** (1.0 / params.alpha) * dz
        elif params.sigma_z > 0.0:                      # alpha = 2 degenerate
            r_new += params.sigma_z * np.sqrt(rp) * dz
        r_new = np.maximum(r_new, 0.0)
        integral += 0.5 * dt * (np.maximum(r, 0.0) + r_new)
        r = r_new
        if keep_paths:
            out[:, k + 1] = r
    return (r, integral, out, times) if keep_paths else (r, integral)


def _thinned_step_arrays(params: ModelParams, y: float):
    """Precomputed constants of the thinned scheme for threshold y."""
    alpha, sz = params.alpha, params.sigma_z
    eps = y / 100.0                       # small-jump cutoff (variance-matched below)
    K = levy_density_coefficient(alpha)
    nu_big = big_jump_mass(alpha, y)
    nu_mid = big_jump_mass(alpha, eps) - nu_big
    mean_mid = K * (eps ** (1.0 - alpha) - y ** (1.0 - alpha)) / (alpha - 1.0)
    var_small = truncated_second_moment(alpha, eps)
    return eps, nu_big, nu_mid, mean_mid, var_small


def simulate_thinned_batch(params: ModelParams, y: float, dt: float,
                           horizon: float, n_paths: int,
                           rng: np.random.Generator,
                           keep_paths: bool = False,
                           stop_at_first_event: bool = False):
    """Truncated dynamics plus thinned big jumps.

    Returns (r_T, integral, first_event_time, n_events[, paths, times]).
    first_event_time is +inf for paths without a big jump.  With
    stop_at_first_event the path is still evolved to the horizon (the state
    after a big jump includes that jump), but bookkeeping of later events is
    skipped; use it for first-passage estimates only.
    """
    _check_alpha(params.alpha, allow_two=False)
    if params.sigma_z <= 0.0:
        raise ValueError("thinned scheme needs sigma_z > 0")
    n_steps, times = _grid(dt, horizon)
    alpha, sz = params.alpha, params.sigma_z
    a_t = truncated_drift(params, y)
    ab = params.a * params.b
    eps, nu_big, nu_mid, mean_mid, var_small = _thinned_step_arrays(params, y)

    r = np.full(n_paths, params.r0)
    integral = np.zeros(n_paths)
    first_event = np.full(n_paths, np.inf)
    n_events = np.zeros(n_paths, dtype=np.int64)
    out = np.empty((n_paths, n_steps + 1)) if keep_paths else None
    if keep_paths:
        out[:, 0] = r
    sqrt_dt = np.sqrt(dt)

    for k in range(n_steps):
        rp = np.maximum(r, 0.0)
        # drift of the truncated dynamics minus the mid-band compensator
        drift = ab - a_t * rp - sz * mean_mid * rp
        gauss_var = params.sigma ** 2 * rp + sz ** 2 * var_small * rp
        incr = drift * dt + np.sqrt(gauss_var * dt) * rng.standard_normal(n_paths)
        # compensated mid-band jumps as a compound Poisson draw
        counts = rng.poisson(rp * nu_mid * dt)
        tot = int(counts.sum())
        if tot:
            marks = sample_truncated_band(alpha, eps, y, rng, size=tot)
            owners = np.repeat(np.arange(n_paths), counts)
            incr += sz * np.bincount(owners, weights=marks, minlength=n_paths)
        # big jumps by thinning against the start-of-step state
        # big jumps: Poisson draw at the start-of-step intensity; two arrivals
        # in one step is an O(dt^2) event, collapsed to one
        big = rng.poisson(rp * nu_big * dt)
        hit = big > 0
        if np.any(hit):
            idx = np.nonzero(hit)[0]
            sizes = sz * (y * rng.uniform(size=idx.size) ** (-1.0 / alpha))
            incr[idx] += sizes
            t_ev = times[k] + dt * rng.uniform(size=idx.size)
            newly = first_event[idx] == np.inf
            first_event[idx[newly]] = t_ev[newly]
            if not stop_at_first_event:
                n_events[idx] += 1
        r_new = np.maximum(r + incr, 0.0)
        integral += 0.5 * dt * (rp + r_new)
        r = r_new
        if keep_paths:
            out[:, k + 1] = r
    if keep_paths:
        return r, integral, first_event, n_events, out, times
    return r, integral, first_event, n_events


def simulate_lou_batch(params: ModelParams, y: float, dt: float, horizon: float,
                       n_paths: int, rng: np.random.Generator,
                       keep_paths: bool = False):
    """Locally equivalent Levy-OU: coefficients frozen at r0, same small/big
    decomposition at mark threshold y, no positivity clamp.

    Returns (lambda_T, first_event_time[, paths, times]).
    """
    _check_alpha(params.alpha, allow_two=False)
    n_steps, times = _grid(dt, horizon)
    alpha, sz, r0 = params.alpha, params.sigma_z, params.r0
    eps, nu_big, nu_mid, mean_mid, var_small = _thinned_step_arrays(params, y)
    theta_big = levy_density_coefficient(alpha) * y ** (1.0 - alpha) / (alpha - 1.0)

    lam = np.full(n_paths, r0)
    first_event = np.full(n_paths, np.inf)
    out = np.empty((n_paths, n_steps + 1)) if keep_paths else None
    if keep_paths:
        out[:, 0] = lam
    gauss_sd = np.sqrt((params.sigma ** 2 * r0 + sz ** 2 * var_small * r0) * dt)
    comp = sz * (mean_mid + theta_big) * r0      # total compensator of frozen jumps
    for k in range(n_steps):
        incr = (params.a * (params.b - lam) - comp) * dt
        incr += gauss_sd * rng.standard_normal(n_paths)
        counts = rng.poisson(r0 * nu_mid * dt, size=n_paths)
        tot = int(counts.sum())
        if tot:
            marks = sample_truncated_band(alpha, eps, y, rng, size=tot)
            owners = np.repeat(np.arange(n_paths), counts)
            incr += sz * np.bincount(owners, weights=marks, minlength=n_paths)
        big = rng.poisson(r0 * nu_big * dt, size=n_paths)
        hit = np.nonzero(big > 0)[0]
        if hit.size:
            sizes = sz * (y * rng.uniform(size=hit.size) ** (-1.0 / alpha))
            incr[hit] += sizes
            t_ev = times[k] + dt * rng.uniform(size=hit.size)
            newly = first_event[hit] == np.inf
            first_event[hit[newly]] = t_ev[newly]
        lam = lam + incr
        if keep_paths:
            out[:, k + 1] = lam
    if keep_paths:
        return lam, first_event, out, times
    return lam, first_event


def simulate_hawkes_batch(a: float, b: float, sigma_z: float, horizon: float,
                          n: int, n_paths: int, rng: np.random.Generator,
                          max_rounds: int = 2_000_000):
    """Exact Ogata simulation of the exponential-kernel self-exciting
    intensity with parameters (a/n, n*b, sigma_z), started from intensity 0,
    run to time n*horizon; returns the rescaled terminal values
    r^(n)_(n*horizon) / n (one per path).

    Between events the intensity relaxes toward c = a*b/kappa with rate
    kappa = a/n + sigma_z; each event adds sigma_z.  The proposal bound per
    path is max(current intensity, c), valid because the intensity is
    monotone toward c between events.
    """
    if n < 1:
        raise ValueError("rescaling index n must be >= 1")
    kappa = a / n + sigma_z
    c = a * b / kappa           # background asymptote: (a/n)*(n*b)/kappa
    t_end = n * horizon
    t = np.zeros(n_paths)
    lam = np.zeros(n_paths)
    active = np.arange(n_paths)
    rounds = 0
    while active.size:
        rounds += 1
        if rounds > max_rounds:
            raise RuntimeError("event overflow guard tripped in Hawkes simulation")
        bound = np.maximum(lam[active], c)
        w = rng.exponential(1.0, size=active.size) / bound
        t_prop = t[active] + w
        decay = np.exp(-kappa * w)
        lam_prop = c + (lam[active] - c) * decay
        done = t_prop >= t_end
        if np.any(done):
            idx = active[done]
            lam[idx] = c + (lam[idx] - c) * np.exp(-kappa * (t_end - t[idx]))
            t[idx] = t_end
        cont = ~done
        idx = active[cont]
        t[idx] = t_prop[cont]
        lam[idx] = lam_prop[cont]
        accept = rng.uniform(size=idx.size) < lam_prop[cont] / bound[cont]
        lam[idx[accept]] += sigma_z
        active = active[cont]
    return lam / n


def simulate_root(params: ModelParams, config: SimConfig,
                  rng: Optional[np.random.Generator] = None) -> Path:
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    _, _, out, times = simulate_root_batch(params, config.dt, config.horizon,
                                           1, rng, keep_paths=True)
    return Path(times=times, values=out[0])


def simulate_thinned(params: ModelParams, config: SimConfig,
                     rng: Optional[np.random.Generator] = None) -> Path:
    if config.scheme != THINNED:
        raise ValueError("config.scheme must be 'thinned'")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    r, integ, first, n_ev, out, times = simulate_thinned_batch(
        params, config.y, config.dt, config.horizon, 1, rng, keep_paths=True)
    path = Path(times=times, values=out[0])
    if np.isfinite(first[0]):
        # per-path event bookkeeping: recover sizes from the recorded steps
        jumps = np.diff(out[0])
        thresh = params.sigma_z * config.y
        ks = np.nonzero(jumps > thresh)[0]
        path.events = [(times[k + 1], float(jumps[k])) for k in ks]
    return path


def simulate_lou(params: ModelParams, config: SimConfig,
                 rng: Optional[np.random.Generator] = None) -> Path:
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    y = config.y if config.y is not None else 1.0
    lam, first, out, times = simulate_lou_batch(
        params, y, config.dt, config.horizon, 1, rng, keep_paths=True)
    path = Path(times=times, values=out[0])
    if np.isfinite(first[0]):
        path.events = [(float(first[0]), float("nan"))]
    return path


def simulate_hawkes(a: float, b: float, sigma_z: float, horizon: float,
                    n: int, rng: Optional[np.random.Generator] = None,
                    seed: int = 0, grid_points: int = 201) -> Path:
    """Single rescaled Hawkes intensity path sampled on a uniform grid of
    t in [0, horizon] (grid evaluation is exact between events)."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    kappa = a / n + sigma_z
    c = a * b / kappa
    t_end = n * horizon
    times = np.linspace(0.0, t_end, grid_points)
    values = np.empty(grid_points)
    t_cur, lam = 0.0, 0.0
    gi = 0
    while gi < grid_points:
        bound = max(lam, c)
        w = rng.exponential(1.0) / bound
        t_next = t_cur + w
        while gi < grid_points and times[gi] <= t_next:
            values[gi] = c + (lam - c) * np.exp(-kappa * (times[gi] - t_cur))
            gi += 1
        if t_next >= t_end:
            break
        lam_next = c + (lam - c) * np.exp(-kappa * w)
        t_cur, lam = t_next, lam_next
        if rng.uniform() < lam_next / bound:
            lam += sigma_z
    return Path(times=times / n, values=values / n)


def write_sidecar(path, command: str, params: Optional[ModelParams],
                  config: Optional[dict], seed: Optional[int],
                  wall_time_s: float, version: str) -> None:
    """JSON sidecar with the reproducibility envelope of a CLI run."""
    doc = {
        "command": command,
        "params": params.to_json() if params is not None else None,
        "config": config,
        "seed": seed,
        "version": version,
        "wall_time_s": wall_time_s,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
