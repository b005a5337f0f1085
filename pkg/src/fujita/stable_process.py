"""Symmetric alpha-stable Levy process: sampling and transition densities.

Scaling convention: E exp(i theta . X_t) = exp(-t |theta|^alpha), i.e. the
generator is the Fourier multiplier -(2 pi |xi|)^alpha for the transform
f^(xi) = int exp(-2 pi i x.xi) f(x) dx. At alpha = 2 the process is
Brownian motion with generator Delta (variance 2t per coordinate); at
alpha = 1 it is the Cauchy process.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, ValidationError
from .special_functions import gamma_fn, sphere_area


def _check_alpha(alpha):
    if not 0 < alpha <= 2:
        raise DomainError(f"alpha out of (0,2]: {alpha!r}")


def make_rng(seed, *stream):
    """Generator for a (seed, stream...) key; distinct keys give independent streams."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, stream)]))


def positive_stable(a: float, rng: np.random.Generator, size) -> np.ndarray:
    """Positive a-stable variables (0 < a <= 1) with E exp(-lam S) = exp(-lam^a).

    Kanter's representation; a = 1 gives S = 1.
    """
    if a == 1.0:
        return np.ones(size)
    u = rng.uniform(0.0, math.pi, size)
    w = rng.standard_exponential(size)
    return (np.sin(a * u) / np.sin(u) ** (1.0 / a)) * (np.sin((1.0 - a) * u) / w) ** ((1.0 - a) / a)


def _cms_symmetric(alpha, rng, size):
    # Chambers-Mallows-Stuck, beta = 0; ch.f. exp(-|theta|^alpha)
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(v)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)) * (
        np.cos((1.0 - alpha) * v) / w
    ) ** ((1.0 - alpha) / alpha)


def sample_increments(alpha: float, h: float, d: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent increments X_h, returned with shape (size, d).

    d = 1 uses Chambers-Mallows-Stuck; d >= 2 subordinates a Gaussian vector
    to a positive (alpha/2)-stable clock, X = sqrt(2 S) Z, which is isotropic.
    """
    _check_alpha(alpha)
    if not h > 0:
        raise DomainError(f"increment length must be positive, got {h!r}")
    scale = h ** (1.0 / alpha)
    if d == 1:
        return scale * _cms_symmetric(alpha, rng, size)[:, None]
    clock = positive_stable(alpha / 2.0, rng, size)
    z = rng.standard_normal((size, d))
    return scale * np.sqrt(2.0 * clock)[:, None] * z


def sample_increment(alpha: float, h: float, d: int, rng: np.random.Generator) -> np.ndarray:
    """One increment of the process over a time step h, as a length-d vector."""
    return sample_increments(alpha, h, d, rng, 1)[0]


@dataclass
class StablePath:
    alpha: float
    d: int
    times: np.ndarray
    positions: np.ndarray
    seed: int
    stream: tuple = field(default=())

    def __post_init__(self):
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise ValidationError("path times must start at 0 and be strictly increasing")


def simulate_path(alpha: float, d: int, x0, times, seed: int, stream=()) -> StablePath:
    """Sample the process at the given times, started from x0."""
    _check_alpha(alpha)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValidationError("times must be a strictly increasing sequence starting at 0")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (d,):
        raise ValidationError(f"x0 must have length d={d}")
    rng = make_rng(seed, *stream)
    positions = np.empty((times.size, d))
    positions[0] = x0
    for i, h in enumerate(np.diff(times), start=1):
        positions[i] = positions[i - 1] + sample_increment(alpha, h, d, rng)
    return StablePath(alpha, d, times, positions, int(seed), tuple(stream))


# ---------------------------------------------------------------------------
# densities


def _density_at_origin(alpha, d):
    # (2 pi)^-d |S^{d-1}| int_0^inf rho^{d-1} exp(-rho^alpha) drho
    return sphere_area(d) * gamma_fn(d / alpha) / (alpha * (2 * math.pi) ** d)


def _fourier_radial_unit_time(alpha, d, r, epsabs=1e-15):
    """p_1(r) by Fourier inversion of exp(-|theta|^alpha), radial Hankel form."""
    if r == 0.0:
        val, _ = integrate.quad(lambda q: q ** (d - 1) * math.exp(-(q**alpha)), 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
        return sphere_area(d) * val / (2 * math.pi) ** d
    # exp(-q^alpha) < 1e-20 beyond q_max
    q_max = (46.0 + 2.0 * math.log1p(d)) ** (1.0 / alpha)
    if d == 1:
        val, _ = integrate.quad(lambda q: math.exp(-(q**alpha)), 0, q_max, weight="cos", wvar=r, epsabs=epsabs, epsrel=1e-12, limit=2000)
        return val / math.pi
    if d == 3:
        val, _ = integrate.quad(lambda q: q * math.exp(-(q**alpha)), 0, q_max, weight="sin", wvar=r, epsabs=epsabs, epsrel=1e-12, limit=2000)
        return val / (2 * math.pi**2 * r)
    # general d: integrate rho^{d/2} J_{d/2-1}(r rho) exp(-rho^alpha) over half-periods
    nu = d / 2 - 1
    edges = np.arange(0.0, q_max + math.pi / r, math.pi / r)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda q: q ** (d / 2) * special.jv(nu, r * q) * math.exp(-(q**alpha)), a, b, epsabs=0, epsrel=1e-12)
        total += val
    return (2 * math.pi) ** (-d / 2) * r ** (1 - d / 2) * total


def _closed_form_unit_time(alpha, d, r):
    if alpha == 2.0:
        return (4 * math.pi) ** (-d / 2) * math.exp(-r * r / 4)
    if alpha == 1.0:
        return gamma_fn((d + 1) / 2) / math.pi ** ((d + 1) / 2) / (1 + r * r) ** ((d + 1) / 2)
    return None


def transition_density(alpha: float, d: int, t: float, x, y, method: str = "auto"):
    """p_t(x, y) of the symmetric alpha-stable process.

    ``method="auto"`` uses the heat/Cauchy closed forms at alpha = 2, 1 and
    Fourier inversion otherwise; ``method="fourier"`` always inverts.
    ``x`` may be a single point or an array of points (shape (n, d) or (n,)
    for d = 1); the result is then an array.
    """
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"transition density needs t > 0, got {t!r}")
    if method not in ("auto", "fourier"):
        raise ValueError(f"unknown method {method!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = x - y
    if d == 1 and diff.ndim <= 1:
        r = np.abs(diff)
    else:
        r = np.linalg.norm(diff, axis=-1)
    scale = t ** (1.0 / alpha)
    rr = np.atleast_1d(r) / scale
    out = np.empty(rr.shape)
    with warnings.catch_warnings():
        # QUADPACK flags roundoff once the absolute floor is reached in the far tail
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i, ri in enumerate(rr):
            val = _closed_form_unit_time(alpha, d, ri) if method == "auto" else None
            if val is None:
                val = _fourier_radial_unit_time(alpha, d, float(ri))
            out[i] = val
    out /= scale**d
    return float(out[0]) if np.ndim(r) == 0 else out.reshape(np.shape(r))


def density_at_origin(alpha: float, d: int, t: float) -> float:
    """p_t(0, 0) in closed form: |S^{d-1}| Gamma(d/alpha) / (alpha (2 pi)^d t^{d/alpha})."""
    return _density_at_origin(alpha, d) / t ** (d / alpha)
