"""Branching mechanism Psi, immigration rate Phi, roots and parameter transforms.

The short rate is characterized as a branching-with-immigration process whose
Laplace exponents are built from

    Psi(q)  = a q + sigma^2 q^2 / 2 - sigma_z^alpha q^alpha / cos(pi*alpha/2)
    Phi(q)  = a b q

with variants: truncated at a z-space threshold y (big jumps removed, their
compensator kept as extra drift) and exponentially tempered with rate theta.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .stable import (
    big_jump_mass,
    big_jump_mean,
    small_jump_compensated_integral,
    _check_alpha,
)

FULL = "full"
TRUNCATED = "truncated"
TEMPERED = "tempered"


@dataclass(frozen=True)
class ModelParams:
    """Model quintuple (a, b, sigma, sigma_z, alpha) plus the initial rate r0.

    a: mean-reversion speed (1/time), strictly positive
    b: long-run level (rate units)
    sigma: diffusion volatility
    sigma_z: jump scale
    alpha: tail index in (1, 2]
    r0: initial short rate
    """

    a: float
    b: float
    sigma: float
    sigma_z: float
    alpha: float
    r0: float = 0.0

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError("mean-reversion speed a must be > 0")
        if self.b < 0.0 or self.sigma < 0.0 or self.sigma_z < 0.0 or self.r0 < 0.0:
            raise ValueError("b, sigma, sigma_z, r0 must be nonnegative")
        _check_alpha(self.alpha)

    @property
    def is_diffusion(self) -> bool:
        """True when there is no jump component (alpha = 2 or sigma_z = 0)."""
        return self.alpha == 2.0 or self.sigma_z == 0.0

    @property
    def sigma_eff(self) -> float:
        """Effective CIR volatility: sqrt(sigma^2 + 2 sigma_z^2) at alpha = 2."""
        if self.alpha == 2.0:
            return float(np.sqrt(self.sigma ** 2 + 2.0 * self.sigma_z ** 2))
        return self.sigma

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "sigma": self.sigma,
                "sigma_z": self.sigma_z, "alpha": self.alpha, "r0": self.r0}

    @classmethod
    def from_json(cls, obj) -> "ModelParams":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(a=obj["a"], b=obj["b"], sigma=obj["sigma"],
                   sigma_z=obj["sigma_z"], alpha=obj["alpha"],
                   r0=obj.get("r0", 0.0))


@dataclass(frozen=True)
class JumpSpec:
    """Which jump mechanism is in force.

    variant 'full': the complete stable measure.
    variant 'truncated': jumps above the z-space threshold y removed, their
        compensator absorbed into the drift.
    variant 'tempered': measure exp(-theta*z) mu_alpha(dz); theta = 0
        coincides with 'full'.
    """

    variant: str = FULL
    y: Optional[float] = None
    theta: Optional[float] = None

    def __post_init__(self):
        if self.variant not in (FULL, TRUNCATED, TEMPERED):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == TRUNCATED and (self.y is None or self.y <= 0.0):
            raise ValueError("truncated variant needs y > 0")
        if self.variant == TEMPERED and (self.theta is None or self.theta < 0.0):
            raise ValueError("tempered variant needs theta >= 0")

    @classmethod
    def full(cls) -> "JumpSpec":
        return cls(FULL)

    @classmethod
    def truncated(cls, y: float) -> "JumpSpec":
        return cls(TRUNCATED, y=y)

    @classmethod
    def tempered(cls, theta: float) -> "JumpSpec":
        return cls(TEMPERED, theta=theta)

    def to_json(self) -> dict:
        out = {"variant": self.variant}
        if self.y is not None:
            out["y"] = self.y
        if self.theta is not None:
            out["theta"] = self.theta
        return out

    @classmethod
    def from_json(cls, obj) -> "JumpSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["variant"], y=obj.get("y"), theta=obj.get("theta"))


@dataclass(frozen=True)
class MechanismReport:
    """Roots of the mechanism: x0 solves Psi(q) = 1 (also written q1 or v*),
    l_star_y solves nu(y) = Psi_trunc(q) for the truncated mechanism."""

    x0: float
    v_star: float
    l_star_y: Optional[float] = None


def truncated_drift(params: ModelParams, y: float) -> float:
    """a_tilde = a + sigma_z * Theta(alpha, y): drift after absorbing the
    big-jump compensator."""
    return params.a + params.sigma_z * big_jump_mean(params.alpha, y)


def truncated_level(params: ModelParams, y: float) -> float:
    """b_tilde = a*b / a_tilde; the product a_tilde * b_tilde stays a*b."""
    return params.a * params.b / truncated_drift(params, y)


def psi(q: float, params: ModelParams, spec: JumpSpec = JumpSpec.full()) -> float:
    """Branching mechanism Psi(q) for q >= 0 in the requested variant."""
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    if q == 0.0:
        return 0.0
    a, s, sz, alpha = params.a, params.sigma, params.sigma_z, params.alpha
    if params.is_diffusion:
        return a * q + 0.5 * params.sigma_eff ** 2 * q * q
    cos_a = np.cos(np.pi * alpha / 2.0)
    if spec.variant == FULL:
        return a * q + 0.5 * s * s * q * q - (sz * q) ** alpha / cos_a
    if spec.variant == TRUNCATED:
        return (truncated_drift(params, spec.y) * q + 0.5 * s * s * q * q
                + small_jump_compensated_integral(q, spec.y, alpha, sz))
    # tempered
    th = spec.theta
    if th == 0.0:
        return a * q + 0.5 * s * s * q * q - (sz * q) ** alpha / cos_a
    jump = -((sz * q + th) ** alpha - th ** alpha
             - alpha * th ** (alpha - 1.0) * sz * q) / cos_a
    return a * q + 0.5 * s * s * q * q + jump


def psi_prime(q: float, params: ModelParams, spec: JumpSpec = JumpSpec.full(),
              h: float = 1e-7) -> float:
    """dPsi/dq; closed form where available, central difference for the
    truncated variant (its small-jump integral has no elementary form)."""
    a, s, sz, alpha = params.a, params.sigma, params.sigma_z, params.alpha
    if params.is_diffusion:
        return a + params.sigma_eff ** 2 * q
    cos_a = np.cos(np.pi * alpha / 2.0)
    if spec.variant == FULL or (spec.variant == TEMPERED and spec.theta == 0.0):
        return a + s * s * q - alpha * sz ** alpha * q ** (alpha - 1.0) / cos_a
    if spec.variant == TEMPERED:
        th = spec.theta
        return (a + s * s * q
                - (alpha * sz * (sz * q + th) ** (alpha - 1.0)
                   - alpha * th ** (alpha - 1.0) * sz) / cos_a)
    step = h * max(1.0, q)
    lo = max(q - step, 0.0)
    return (psi(q + step, params, spec) - psi(lo, params, spec)) / (q + step - lo)


def phi(q: float, params: ModelParams) -> float:
    """Immigration rate Phi(q) = a*b*q (identical across variants)."""
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    return params.a * params.b * q


def _bracket_and_bisect(f, q_max: float = 1e12) -> float:
    """Root of a decreasing f with f(0) > 0: bracket by doubling from q = 1
    until sign change, then 80 bisections.  Callers Newton-polish the result."""
    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        lo, hi = hi, hi * 2.0
        if hi > q_max:
            raise ValueError("root bracketing exceeded bound; pathological parameters")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def root_psi_equals_one(params: ModelParams,
                        spec: JumpSpec = JumpSpec.full()) -> float:
    """x0 = q1 with Psi(x0) = 1; unique since Psi is convex increasing with
    Psi(0) = 0 and unbounded."""
    x = _bracket_and_bisect(lambda q: 1.0 - psi(q, params, spec))
    # Newton polish on g(q) = Psi(q) - 1
    for _ in range(6):
        g = psi(x, params, spec) - 1.0
        gp = psi_prime(x, params, spec)
        if gp <= 0.0:
            break
        x_new = x - g / gp
        if x_new <= 0.0 or abs(x_new - x) < 1e-16 * max(1.0, x):
            x = max(x_new, 1e-300)
            break
        x = x_new
    return x


def fixed_point_truncated(params: ModelParams, y: float) -> float:
    """l*_y with F(l*) = 0 where F(q) = nu(y) - Psi_trunc(q); F > 0 below the
    root and F < 0 above it."""
    _check_alpha(params.alpha, allow_two=False)
    if params.sigma_z <= 0.0:
        raise ValueError("fixed point needs a jump component (sigma_z > 0)")
    spec = JumpSpec.truncated(y)
    nu = big_jump_mass(params.alpha, y)
    x = _bracket_and_bisect(lambda q: nu - psi(q, params, spec))
    for _ in range(6):
        g = psi(x, params, spec) - nu
        gp = psi_prime(x, params, spec)
        if gp <= 0.0:
            break
        x_new = x - g / gp
        if x_new <= 0.0:
            break
        if abs(x_new - x) < 1e-15 * max(1.0, x):
            x = x_new
            break
        x = x_new
    return x


def mechanism_report(params: ModelParams, y: Optional[float] = None) -> MechanismReport:
    x0 = root_psi_equals_one(params)
    lstar = fixed_point_truncated(params, y) if y is not None else None
    return MechanismReport(x0=x0, v_star=x0, l_star_y=lstar)


INACCESSIBLE = "inaccessible"
ACCESSIBLE = "accessible"


def boundary_classification(params: ModelParams) -> str:
    """Whether the rate can hit zero.

    alpha in (1,2): inaccessible iff 2ab >= sigma^2 (the jump part never
    forces the boundary; a pure-jump model with ab > 0 never reaches 0).
    alpha = 2: the classical criterion with the effective volatility,
    2ab >= sigma^2 + 2 sigma_z^2.
    """
    if params.alpha == 2.0:
        crit = params.sigma ** 2 + 2.0 * params.sigma_z ** 2
    else:
        crit = params.sigma ** 2
    return INACCESSIBLE if 2.0 * params.a * params.b >= crit else ACCESSIBLE


def change_of_measure(params: ModelParams, eta: float, theta: float):
    """Equivalent-measure parameter transform (exponential tilt of the noise).

    a' = a - sigma*eta - alpha*sigma_z*theta^(alpha-1)/cos(pi*alpha/2),
    b' = a*b/a'; the jump measure becomes tempered with rate theta
    (theta = 0 keeps the full stable measure).  Rejects a' <= 0.
    """
    if theta < 0.0:
        raise ValueError("tempering rate theta must be nonnegative")
    alpha = params.alpha
    tilt = 0.0
    if theta > 0.0 and params.sigma_z > 0.0:
        tilt = (alpha * params.sigma_z * theta ** (alpha - 1.0)
                / np.cos(np.pi * alpha / 2.0))
    a_new = params.a - params.sigma * eta - tilt
    if a_new <= 0.0:
        raise ValueError("transform gives nonpositive mean reversion a'")
    b_new = params.a * params.b / a_new
    new_params = ModelParams(a=a_new, b=b_new, sigma=params.sigma,
                             sigma_z=params.sigma_z, alpha=alpha, r0=params.r0)
    spec = JumpSpec.full() if theta == 0.0 else JumpSpec.tempered(theta)
    return new_params, spec
