"""Reaction term G, its standing assumptions, and the (d, alpha, beta) regime.

Two parametric families are supported so that the growth/convexity
conditions can be checked mechanically:

* ``PowerLaw``:        G(z) = c z^(1+beta)
* ``ScaledPowerLaw``:  G(z) = c z^(1+beta) (1 + z^beta)

Both are convex, non-decreasing, vanish at 0, have G(z)/z^(1+beta) -> c
as z -> 0+, and 1/G is integrable at infinity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, ValidationError


class Kind(str, enum.Enum):
    POWER_LAW = "PowerLaw"
    SCALED_POWER_LAW = "ScaledPowerLaw"


class Regime(str, enum.Enum):
    BLOW_UP_FOR_ALL = "BlowUpForAll"
    GLOBAL = "GlobalRegime"


@dataclass(frozen=True)
class NonlinearitySpec:
    kind: Kind = Kind.POWER_LAW
    beta: float = 1.0
    c: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        errors = []
        try:
            object.__setattr__(self, "kind", Kind(self.kind))
        except ValueError:
            errors.append(f"unknown nonlinearity kind {self.kind!r}")
        for name in ("beta", "c", "theta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                errors.append(f"{name} must be a positive finite number, got {value!r}")
        if errors:
            raise ValidationError("; ".join(errors), errors)

    # -- evaluation -----------------------------------------------------

    def __call__(self, z):
        return evaluate_G(self, z)

    def ratio(self, z):
        """G(z)/z, extended by 0 at z = 0."""
        z = _nonneg(z)
        out = self.c * z**self.beta
        if self.kind is Kind.SCALED_POWER_LAW:
            out = out * (1.0 + z**self.beta)
        return _out(out)

    def derivative(self, z):
        z = _nonneg(z)
        b, c = self.beta, self.c
        if self.kind is Kind.POWER_LAW:
            return _out(c * (1 + b) * z**b)
        return _out(c * ((1 + b) * z**b + (1 + 2 * b) * z ** (2 * b)))

    def inverse(self, y):
        """G^{-1}(y) for y >= 0 (G is a strictly increasing bijection of R_+)."""
        y = np.asarray(y, dtype=float)
        if self.kind is Kind.POWER_LAW:
            out = (y / self.c) ** (1.0 / (1.0 + self.beta))
        else:
            # solve c z^(1+b) (1 + z^b) = y by bisection in log space
            out = np.vectorize(self._inverse_scalar)(y)
        return float(out) if out.ndim == 0 else out

    def _inverse_scalar(self, y):
        if y <= 0:
            return 0.0
        lo, hi = 0.0, max(1.0, (y / self.c) ** (1.0 / (1.0 + self.beta)))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if evaluate_G(self, mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def to_dict(self):
        return {"kind": self.kind.value, "beta": self.beta, "c": self.c, "theta": self.theta}


def _nonneg(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("G is defined on z >= 0 only")
    return z


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def evaluate_G(spec: NonlinearitySpec, z):
    """G(z) for the given family; scalar in, scalar out."""
    z_arr = _nonneg(z)
    out = spec.c * z_arr ** (1.0 + spec.beta)
    if spec.kind is Kind.SCALED_POWER_LAW:
        out = out * (1.0 + z_arr**spec.beta)
    return _out(out)


def convexity_gap(spec: NonlinearitySpec, eps: float, M: float, n_grid: int = 4000, safety: float = 0.99) -> float:
    """An eps' > 0 with G((1+eps)z)/((1+eps)z) > (1+eps') G(z)/z on (0, M].

    For a pure power law the ratio is exactly (1+eps)^beta. Otherwise the
    ratio is minimised over a log-spaced grid reaching twelve decades below
    M (the z -> 0 limit is (1+eps)^beta by the small-z asymptotics) and
    shrunk by ``safety``.
    """
    if not eps > 0 or not M > 0:
        raise DomainError("convexity_gap requires eps > 0 and M > 0")
    if spec.kind is Kind.POWER_LAW:
        return (1.0 + eps) ** spec.beta - 1.0
    z = np.geomspace(M * 1e-12, M, n_grid)
    ratio = spec.ratio((1 + eps) * z) / spec.ratio(z)
    worst = min(float(ratio.min()), (1 + eps) ** spec.beta)
    gap = safety * (worst - 1.0)
    if not gap > 0:
        raise ValidationError("no positive convexity gap found; G violates the growth condition")
    return gap


def check_g1(spec: NonlinearitySpec, z_small: float = 1e-8) -> float:
    """Return |G(z)/z^(1+beta) - c| / c at a small z."""
    return abs(evaluate_G(spec, z_small) / z_small ** (1 + spec.beta) - spec.c) / spec.c


def g2_tail_integral(spec: NonlinearitySpec, upper: float = 1e6, rtol: float = 1e-3):
    """Integral of 1/G over [theta, X] for doubling X up to ``upper``.

    Returns (values, converged) where ``converged`` is the Cauchy test on
    the last two values.
    """
    X = 2.0 * spec.theta
    values = []
    while X <= upper:
        val, _ = integrate.quad(lambda s: 1.0 / evaluate_G(spec, math.exp(s)) * math.exp(s),
                                math.log(spec.theta), math.log(X), limit=200)
        values.append(val)
        X *= 2.0
    converged = len(values) >= 2 and abs(values[-1] - values[-2]) <= rtol * abs(values[-1])
    return values, converged


def blowup_time_ode(spec: NonlinearitySpec, z0: float) -> float:
    """Blow-up time of z' = G(z), z(0) = z0 > 0: int_{z0}^inf dz / G(z)."""
    if not z0 > 0:
        return math.inf
    if spec.kind is Kind.POWER_LAW:
        return 1.0 / (spec.c * spec.beta * z0**spec.beta)
    # dz / G(z) = ds / (G(z)/z) with z = e^s; the tail beyond e^700 is below 1e-300
    with np.errstate(over="ignore"):
        val, _ = integrate.quad(lambda s: 1.0 / spec.ratio(math.exp(s)), math.log(z0), 700.0, limit=200)
    return val


def is_convex_on_grid(spec: NonlinearitySpec, z_max: float = 10.0, n: int = 100) -> bool:
    z = np.linspace(0.0, z_max, n)
    a, b = z[:-2], z[2:]
    mid = evaluate_G(spec, 0.5 * (a + b))
    return bool(np.all(mid <= 0.5 * (evaluate_G(spec, a) + evaluate_G(spec, b)) * (1 + 1e-14)))


def p_crit(d: int, alpha: float) -> float:
    """Critical exponent (d + alpha)/(d - alpha) of the explicit steady states."""
    if not d > alpha:
        raise DomainError(f"p_crit needs d > alpha (d={d}, alpha={alpha})")
    return (d + alpha) / (d - alpha)


def regime(d: int, alpha: float, spec: NonlinearitySpec) -> Regime:
    """Every non-trivial solution blows up iff d <= alpha/beta."""
    if not 0 < alpha <= 2:
        raise DomainError(f"alpha out of (0,2]: {alpha!r}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d!r}")
    return Regime.BLOW_UP_FOR_ALL if d <= alpha / spec.beta else Regime.GLOBAL
