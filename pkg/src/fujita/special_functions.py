"""Gamma, Macdonald (Bessel K) function, the B_w kernel and the Riesz constant.

Bessel K is computed from its integral representation

    K_nu(z) = 1/2 (z/2)^nu  int_0^inf r^(-nu-1) exp(-r - z^2/(4r)) dr

after the substitution r = exp(s), which turns both endpoint singularities
into double-exponential decay. The integrand is re-centred on its maximum so
that the quadrature works with O(1) numbers for any (nu, z) in range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for real x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    # log form keeps t^(x+1/2) from overflowing before exp(-t) compensates
    return math.sqrt(2.0 * math.pi) * acc * math.exp((x + 0.5) * math.log(t) - t)


def _log_integrand(s, nu, z):
    return nu * math.log(0.5 * z) - nu * s - math.exp(s) - 0.25 * z * z * math.exp(-s)


def _bessel_k_scalar(nu: float, z: float, rtol: float) -> float:
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"bessel_k requires z > 0, got {z!r}")
    # maximiser of the log-integrand: e^s = (sqrt(nu^2 + z^2) - nu) / 2
    root = math.hypot(nu, z)
    es = z * z / (2.0 * (root + nu)) if nu >= 0 else 0.5 * (root - nu)
    s0 = math.log(es)
    g0 = _log_integrand(s0, nu, z)
    width = 1.0 / math.sqrt(es + 0.25 * z * z / es)

    def find_edge(direction):
        step = width
        s = s0
        while _log_integrand(s + direction * step, nu, z) - g0 > -60.0:
            s += direction * step
            step *= 1.5
        return s + direction * step

    lo, hi = find_edge(-1.0), find_edge(1.0)
    val, err, info = integrate.quad(
        lambda s: math.exp(_log_integrand(s, nu, z) - g0),
        lo,
        hi,
        epsabs=0.0,
        epsrel=rtol,
        limit=400,
        full_output=True,
    )[:3]
    if err > 1e3 * rtol * abs(val):
        raise NumericalError(
            "Bessel K quadrature did not converge",
            {"nu": nu, "z": z, "value": val, "abserr": err, "neval": info.get("neval")},
        )
    return 0.5 * math.exp(g0) * val


def bessel_k(nu, z, rtol: float = 1e-13):
    """Macdonald function K_nu(z) for real nu and z > 0.

    Accepts scalars or arrays (broadcast elementwise).
    """
    if np.ndim(nu) == 0 and np.ndim(z) == 0:
        return _bessel_k_scalar(float(nu), float(z), rtol)
    nu_b, z_b = np.broadcast_arrays(np.asarray(nu, float), np.asarray(z, float))
    out = np.empty(nu_b.shape)
    for idx in np.ndindex(nu_b.shape):
        out[idx] = _bessel_k_scalar(float(nu_b[idx]), float(z_b[idx]), rtol)
    return out


def b_kernel(w: float, d: int, r):
    """Radial profile of the Bessel-potential kernel B_w at |x| = r.

    B_w(r) = 2^((d-w)/2 + 1) / (Gamma(w/2) (4 pi)^(d/2)) * r^((w-d)/2) K_((d-w)/2)(r)
    """
    if not w > 0:
        raise DomainError(f"b_kernel requires w > 0, got {w!r}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("b_kernel requires r > 0")
    pref = 2.0 ** ((d - w) / 2 + 1) / (gamma_fn(w / 2) * (4 * math.pi) ** (d / 2))
    out = pref * r ** ((w - d) / 2) * bessel_k((d - w) / 2, r)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RieszConstant:
    """Normalisation of the Riesz kernel A(d, alpha) |x-y|^(alpha-d)."""

    d: int
    alpha: float
    value: float

    def __float__(self):
        return self.value


def riesz_constant(d: int, alpha: float) -> RieszConstant:
    """A(d, alpha) = Gamma((d-alpha)/2) / (Gamma(alpha/2) 2^alpha pi^(d/2)).

    Only defined in the transient case d > alpha.
    """
    if not 0 < alpha <= 2:
        raise DomainError(f"alpha out of (0,2]: {alpha!r}")
    if d < 1 or int(d) != d:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if not d > alpha:
        raise DomainError(f"Riesz constant needs d > alpha (got d={d}, alpha={alpha})")
    value = gamma_fn((d - alpha) / 2) / (gamma_fn(alpha / 2) * 2.0**alpha * math.pi ** (d / 2))
    return RieszConstant(int(d), float(alpha), value)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^(d-1) in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2) / gamma_fn(d / 2)
