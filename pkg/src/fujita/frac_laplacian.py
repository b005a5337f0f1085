"""Fractional Laplacian Delta_alpha = -(-Delta)^(alpha/2), two ways.

``apply_spectral`` is the Fourier multiplier -(2 pi |k| / L)^alpha on a
periodic grid and drives the time stepper. ``apply_pointwise_pv`` evaluates
the singular integral

    c_{alpha,d} PV int (f(x+y) - f(x)) / |y|^(d+alpha) dy

at a single point, for checking the spectral operator independently.
"""

from __future__ import annotations

import functools
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import fft, integrate, special

from .errors import DomainError, NumericalError, ValidationError
from .special_functions import gamma_fn, sphere_area


def fft_workers() -> int:
    """Thread count for FFTs, from FUJITA_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("FUJITA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class GridField:
    """Samples of a function on the periodic grid of [-L/2, L/2)^d.

    Node j along each axis sits at -L/2 + j L/N.
    """

    d: int
    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not 1 <= self.d <= 3:
            raise ValidationError(f"grid dimension must be 1, 2 or 3, got {self.d}")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValidationError(f"N must be a power of two, got {self.N}")
        if self.values.shape != (self.N,) * self.d:
            raise ValidationError(f"values shape {self.values.shape} != {(self.N,) * self.d}")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("grid values must be finite")

    @property
    def h(self) -> float:
        return self.L / self.N

    def axis(self) -> np.ndarray:
        return -0.5 * self.L + self.h * np.arange(self.N)

    def mesh(self):
        ax = self.axis()
        if self.d == 1:
            return (ax,)
        return np.meshgrid(*([ax] * self.d), indexing="ij")

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.mesh()))

    def with_values(self, values) -> "GridField":
        return GridField(self.d, self.L, self.N, values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def inner(self, other: "GridField") -> float:
        return float(np.sum(self.values * other.values) * self.h**self.d)

    @classmethod
    def from_function(cls, f, d: int, L: float, N: int) -> "GridField":
        """Sample ``f`` at the nodes; ``f`` receives one coordinate array per axis."""
        probe = cls(d, L, N, np.zeros((N,) * d))
        return cls(d, L, N, np.broadcast_to(f(*probe.mesh()), (N,) * d).copy())

    @classmethod
    def radial(cls, profile, d: int, L: float, N: int, center=None) -> "GridField":
        """Sample a radial profile ``profile(r)`` about ``center``."""
        probe = cls(d, L, N, np.zeros((N,) * d))
        center = np.zeros(d) if center is None else np.asarray(center, float)
        r = np.sqrt(sum((c - x0) ** 2 for c, x0 in zip(probe.mesh(), center)))
        return cls(d, L, N, profile(r))


@functools.lru_cache(maxsize=32)
def _wavenumber_norm(d: int, L: float, N: int) -> np.ndarray:
    """2 pi |k| / L on the real-FFT half spectrum."""
    k_full = fft.fftfreq(N, d=1.0 / N)
    k_half = fft.rfftfreq(N, d=1.0 / N)
    axes = [k_full] * (d - 1) + [k_half]
    grids = np.meshgrid(*axes, indexing="ij")
    out = 2.0 * math.pi / L * np.sqrt(sum(g * g for g in grids))
    out.setflags(write=False)
    return out


def fourier_multiply(field: GridField, multiplier) -> GridField:
    """Apply a radial Fourier multiplier m(2 pi |k| / L) to a grid field."""
    axes = tuple(range(field.d))
    spec = fft.rfftn(field.values, axes=axes, workers=fft_workers())
    spec *= multiplier(_wavenumber_norm(field.d, field.L, field.N))
    out = fft.irfftn(spec, s=field.values.shape, axes=axes, workers=fft_workers())
    return field.with_values(out)


def _check_alpha(alpha):
    if not 0 < alpha <= 2:
        raise DomainError(f"alpha out of (0,2]: {alpha!r}")


def apply_spectral(field: GridField, alpha: float) -> GridField:
    """Delta_alpha on the torus: multiply mode k by -(2 pi |k| / L)^alpha."""
    _check_alpha(alpha)
    return fourier_multiply(field, lambda q: -(q**alpha))


# ---------------------------------------------------------------------------
# pointwise principal-value evaluator


def pv_constant_closed_form(alpha: float, d: int) -> float:
    """2^alpha Gamma((d+alpha)/2) / (pi^(d/2) |Gamma(-alpha/2)|), for 0 < alpha < 2."""
    if not 0 < alpha < 2:
        raise DomainError("the singular-integral constant is defined for 0 < alpha < 2")
    # |Gamma(-a/2)| = Gamma(1 - a/2) / (a/2)
    g_neg = gamma_fn(1 - alpha / 2) / (alpha / 2)
    return 2.0**alpha * gamma_fn((d + alpha) / 2) / (math.pi ** (d / 2) * g_neg)


def _laplacian_fd(f, x, h):
    """Fourth-order central-difference Laplacian of f at x."""
    x = np.asarray(x, dtype=float)
    f0 = f(x)
    total = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        total += (-f(x + 2 * e) + 16 * f(x + e) - 30 * f0 + 16 * f(x - e) - f(x - 2 * e)) / (12 * h * h)
    return total


def _sphere_rule(d, n):
    """Nodes on S^{d-1} and weights summing to 1 (exact for polynomials up to high degree)."""
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([0.5, 0.5])
    if d == 2:
        th = 2 * math.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(n, 1.0 / n)
    t, wt = np.polynomial.legendre.leggauss(n)
    ph = 2 * math.pi * (np.arange(2 * n) + 0.5) / (2 * n)
    T, P = np.meshgrid(t, ph, indexing="ij")
    s = np.sqrt(1 - T * T)
    nodes = np.column_stack([(s * np.cos(P)).ravel(), (s * np.sin(P)).ravel(), T.ravel()])
    weights = (wt[:, None] * np.full(2 * n, 1.0 / (2 * n))[None, :]).ravel() / 2.0
    return nodes, weights


def _spherical_mean(f, x, rho, d, n_sphere):
    nodes, weights = _sphere_rule(d, n_sphere)
    pts = x[None, :] + rho * nodes
    return float(np.dot(weights, [f(p) for p in pts]))


def pv_integral(f, alpha: float, d: int, x, r0: float = 1e-2, period: float | None = None,
                h_fd: float = 1e-2, n_sphere: int = 64, rtol: float = 1e-10, n_periods: int = 16) -> float:
    """Uncalibrated PV int (f(x+y) - f(x)) / |y|^(d+alpha) dy.

    Split at |y| = r0: inside, the symmetrised second difference is replaced by
    its Taylor term Delta f(x) |y|^2 / (2d); outside, the radial integral of the
    spherical mean of f is done by adaptive quadrature, with the constant
    -f(x) part integrated exactly. If ``period`` is given (d = 1 only), f is
    L-periodic and the far field beyond ``n_periods`` periods is replaced by
    the mean of f (error of order |f|_1 R^(-1-alpha) at cutoff R).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != d:
        raise DomainError(f"point must have {d} coordinates")
    fx = f(x)
    area = sphere_area(d)
    lap = _laplacian_fd(f, x, h_fd)
    inner = area * lap * r0 ** (2 - alpha) / (2 * d * (2 - alpha))

    def g(rho):
        return rho ** (-1 - alpha) * _spherical_mean(f, x, rho, d, n_sphere)

    edges = [r0]
    mean_tail = 0.0
    if period is not None:
        if d != 1:
            raise DomainError("periodic PV evaluation is implemented for d = 1")
        edges += list(np.arange(0.5, n_periods + 0.25, 0.5) * period)
        mean = integrate.quad(lambda s: f(np.array([s])), -period / 2, period / 2, limit=400)[0] / period
        mean_tail = mean * edges[-1] ** (-alpha) / alpha
    else:
        edges += [e for e in (1.0, 3.0, 10.0, 30.0, 100.0) if e > r0] + [np.inf]
    outer = 0.0
    err_total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                val, err = integrate.quad(g, a, b, epsabs=0.0, epsrel=rtol, limit=400)
            except integrate.IntegrationWarning as exc:
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err = integrate.quad(g, a, b, epsabs=1e-13, epsrel=rtol, limit=400)
                if err > 1e-6 * max(1.0, abs(val)):
                    raise NumericalError("PV outer quadrature failed", {"interval": (a, b), "abserr": err, "cause": str(exc)})
            outer += val
            err_total += err
    outer = area * (outer + mean_tail - fx * r0 ** (-alpha) / alpha)
    return inner + outer


def _gaussian_spectral_value(alpha, d, r):
    """Delta_alpha exp(-|x|^2) at |x| = r via the continuous Fourier multiplier."""
    if r == 0.0:
        return -(math.pi ** (d / 2)) * (2 * math.pi) ** (-d) * sphere_area(d) * 2 ** (alpha + d - 1) * gamma_fn((alpha + d) / 2)
    nu = d / 2 - 1
    val, _ = integrate.quad(
        lambda q: q ** (alpha + d / 2) * math.exp(-q * q / 4) * special.jv(nu, r * q),
        0, 60.0, epsabs=0, epsrel=1e-12, limit=400,
    )
    return -(2 * math.pi) ** (-d / 2) * r ** (1 - d / 2) * math.pi ** (d / 2) * val


def _gaussian(x):
    return math.exp(-float(np.dot(x, x)))


@functools.lru_cache(maxsize=64)
def pv_constant(alpha: float, d: int, r0: float = 1e-2) -> float:
    """c_{alpha,d}, fitted by least squares so that the PV evaluator matches the
    Fourier multiplier on exp(-|x|^2) at |x| in {0, 0.5, 1, 1.5}."""
    _check_alpha(alpha)
    if alpha == 2:
        raise DomainError("alpha = 2 is the local Laplacian; no singular-integral constant")
    radii = (0.0, 0.5, 1.0, 1.5)
    pv = np.array([pv_integral(_gaussian, alpha, d, np.r_[r, np.zeros(d - 1)], r0=r0) for r in radii])
    ref = np.array([_gaussian_spectral_value(alpha, d, r) for r in radii])
    return float(np.dot(pv, ref) / np.dot(pv, pv))


def apply_pointwise_pv(f, alpha: float, d: int, x, r0: float = 1e-2, period: float | None = None, **kw) -> float:
    """Delta_alpha f(x) from the singular integral with the calibrated constant.

    ``f`` maps a length-d coordinate array to a float. At alpha = 2 the
    operator is local and the finite-difference Laplacian is returned.
    """
    _check_alpha(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if alpha == 2:
        return _laplacian_fd(f, x, kw.get("h_fd", 1e-2))
    return pv_constant(float(alpha), int(d), float(r0)) * pv_integral(f, alpha, d, x, r0=r0, period=period, **kw)
