"""Spectrally positive alpha-stable increments and Levy-measure utilities.

The jump driver Z has Levy measure

    mu_alpha(dz) = -dz / (cos(pi*alpha/2) * Gamma(-alpha) * z^(1+alpha)),   1 < alpha < 2,

concentrated on z > 0, and unit-time Laplace transform
E[exp(-q Z_1)] = exp(-q^alpha / cos(pi*alpha/2)).  At alpha = 2 the driver
degenerates to sqrt(2) times a Brownian motion and the jump measure is
undefined (pole of Gamma(-alpha)); callers must special-case the diffusion.

All thresholds here live in z-space (the jump mark), not in rate space: a
jump of the rate has size sigma_z * z, so a rate-space threshold ybar
corresponds to z-threshold ybar / sigma_z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn


def _check_alpha(alpha: float, allow_two: bool = True) -> None:
    hi_ok = alpha <= 2.0 if allow_two else alpha < 2.0
    if not (1.0 < alpha and hi_ok):
        bound = "(1, 2]" if allow_two else "(1, 2)"
        raise ValueError(f"alpha must be in {bound}, got {alpha}")


@dataclass(frozen=True)
class StableSpec:
    """Tail index of the driver; scale convention is fixed by the Laplace
    transform exp(-dt * q^alpha / cos(pi*alpha/2)) for an increment over dt."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)


def levy_density_coefficient(alpha: float) -> float:
    """K with mu_alpha(dz) = K * z^(-1-alpha) dz.

    Equals -1 / (cos(pi*alpha/2) * Gamma(-alpha)); by the reflection formula
    also (2/pi) * sin(pi*alpha/2) * Gamma(alpha + 1).
    """
    _check_alpha(alpha, allow_two=False)
    return -1.0 / (np.cos(np.pi * alpha / 2.0) * gamma_fn(-alpha))


def tail_constant(alpha: float) -> float:
    """C_alpha = (2/pi) * Gamma(alpha) * sin(pi*alpha/2), the big-jump mass scale."""
    _check_alpha(alpha, allow_two=False)
    return (2.0 / np.pi) * gamma_fn(alpha) * np.sin(np.pi * alpha / 2.0)


def levy_density(z, alpha: float):
    """Density of mu_alpha at z > 0."""
    z = np.asarray(z, dtype=float)
    return levy_density_coefficient(alpha) * z ** (-1.0 - alpha)


def big_jump_mass(alpha: float, y: float) -> float:
    """nu(y) = mu_alpha((y, inf)) = C_alpha * y^(-alpha)."""
    _check_alpha(alpha, allow_two=False)
    if y <= 0.0:
        raise ValueError("threshold y must be positive")
    return tail_constant(alpha) * y ** (-alpha)


def big_jump_mean(alpha: float, y: float) -> float:
    """Theta(alpha, y) = int_y^inf z mu_alpha(dz)
    = (2/pi) * alpha * Gamma(alpha-1) * sin(pi*alpha/2) * y^(1-alpha)."""
    _check_alpha(alpha, allow_two=False)
    if y <= 0.0:
        raise ValueError("threshold y must be positive")
    return levy_density_coefficient(alpha) * y ** (1.0 - alpha) / (alpha - 1.0)


def small_jump_compensated_integral(q: float, y: float, alpha: float,
                                    sigma_z: float) -> float:
    """int_0^y (exp(-q*sigma_z*z) - 1 + q*sigma_z*z) mu_alpha(dz).

    The integrand behaves like (q*sigma_z)^2 z^(1-alpha) / 2 near 0:
    integrable but stiff, so the interval is split at eps with a 3-term
    Taylor expansion on [0, eps] and adaptive quadrature on [eps, y].
    """
    _check_alpha(alpha, allow_two=False)
    if y <= 0.0:
        raise ValueError("threshold y must be positive")
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    if q == 0.0 or sigma_z == 0.0:
        return 0.0
    c = q * sigma_z
    K = levy_density_coefficient(alpha)
    eps = min(y, 1e-3) / 2.0
    # Taylor part on [0, eps]: c^2 z^2/2 - c^3 z^3/6 + c^4 z^4/24
    taylor = K * (c ** 2 * eps ** (2.0 - alpha) / (2.0 * (2.0 - alpha))
                  - c ** 3 * eps ** (3.0 - alpha) / (6.0 * (3.0 - alpha))
                  + c ** 4 * eps ** (4.0 - alpha) / (24.0 * (4.0 - alpha)))

    def integrand(z):
        return (np.expm1(-c * z) + c * z) * K * z ** (-1.0 - alpha)

    val, _ = quad(integrand, eps, y, epsabs=1e-14, epsrel=1e-12, limit=200)
    return taylor + val


def big_jump_laplace_tail(c: float, y: float, alpha: float) -> float:
    """int_y^inf exp(-c*z) mu_alpha(dz), for c >= 0."""
    _check_alpha(alpha, allow_two=False)
    if c == 0.0:
        return big_jump_mass(alpha, y)
    K = levy_density_coefficient(alpha)

    def integrand(z):
        return K * np.exp(-c * z) * z ** (-1.0 - alpha)

    val, _ = quad(integrand, y, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def sample_stable_increment(spec: StableSpec, dt: float, rng: np.random.Generator,
                            size=None):
    """Draw Z_{t+dt} - Z_t, zero mean, spectrally positive.

    Uses the Chambers-Mallows-Stuck transform for S_alpha(dt^(1/alpha), 1, 0)
    in the 1-parametrization; for alpha > 1 that law already has mean zero.
    alpha = 2 is Gaussian with variance 2*dt.
    """
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    alpha = spec.alpha
    scalar = size is None
    n = 1 if scalar else size
    if dt == 0.0:
        out = np.zeros(n)
        return float(out[0]) if scalar else out
    if alpha == 2.0:
        out = rng.normal(0.0, np.sqrt(2.0 * dt), size=n)
        return float(out[0]) if scalar else out

    u = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size=n)
    w = rng.exponential(1.0, size=n)
    tb = np.tan(np.pi * alpha / 2.0)          # beta = 1
    b = np.arctan(tb) / alpha
    s = (1.0 + tb * tb) ** (1.0 / (2.0 * alpha))
    x = (s * np.sin(alpha * (u + b)) / np.cos(u) ** (1.0 / alpha)
         * (np.cos(u - alpha * (u + b)) / w) ** ((1.0 - alpha) / alpha))
    out = dt ** (1.0 / alpha) * x
    return float(out[0]) if scalar else out


def sample_pareto_tail(alpha: float, y: float, rng: np.random.Generator, size=None):
    """Jump marks above y under the normalized tail of mu_alpha: z = y * U^(-1/alpha)."""
    _check_alpha(alpha, allow_two=False)
    u = rng.uniform(size=size)
    return y * u ** (-1.0 / alpha)


def sample_truncated_band(alpha: float, lo: float, hi: float,
                          rng: np.random.Generator, size=None):
    """Jump marks in (lo, hi) under mu_alpha restricted and normalized (inverse cdf)."""
    _check_alpha(alpha, allow_two=False)
    if not 0.0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    u = rng.uniform(size=size)
    ratio = (lo / hi) ** alpha
    return lo * (1.0 - u * (1.0 - ratio)) ** (-1.0 / alpha)


def truncated_second_moment(alpha: float, eps: float) -> float:
    """int_0^eps z^2 mu_alpha(dz) = K * eps^(2-alpha) / (2-alpha)."""
    _check_alpha(alpha, allow_two=False)
    return levy_density_coefficient(alpha) * eps ** (2.0 - alpha) / (2.0 - alpha)
