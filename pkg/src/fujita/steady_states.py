"""Explicit stationary solutions of Delta_alpha u + u^p = 0 at the critical
exponent p = (d+alpha)/(d-alpha), the singular solution, the Kelvin transform,
and two independent checks: the real-space Riesz fixed point

    u(x) = A(d, alpha) int u^p(y) |x - y|^(alpha - d) dy

and the Fourier-side identity between the Macdonald-function transform of u
and the transform of the Riesz potential of u^p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericalError, ValidationError
from .nonlinearity import p_crit
from .special_functions import b_kernel, bessel_k, gamma_fn, riesz_constant, sphere_area


@dataclass(frozen=True)
class SteadyStateParams:
    """Member u_{c,A} of the explicit family: A / (1 + (a_scale |x-c|)^2)^((d-alpha)/2)."""

    A: float
    d: int
    alpha: float
    c: tuple = field(default=None)

    def __post_init__(self):
        errors = []
        if not (isinstance(self.d, (int, np.integer)) and self.d >= 1):
            errors.append(f"d must be a positive integer, got {self.d!r}")
        if not 0 < self.alpha <= 2:
            errors.append(f"alpha out of (0,2]: {self.alpha!r}")
        elif not self.d > self.alpha:
            errors.append(f"steady-state family needs d > alpha (d={self.d}, alpha={self.alpha})")
        if not (math.isfinite(self.A) and self.A > 0):
            errors.append(f"A must be positive, got {self.A!r}")
        if errors:
            raise ValidationError("; ".join(errors), errors)
        c = (0.0,) * int(self.d) if self.c is None else tuple(float(v) for v in np.atleast_1d(self.c))
        if len(c) != self.d:
            raise ValidationError(f"center must have {self.d} coordinates")
        object.__setattr__(self, "c", c)

    @property
    def p(self) -> float:
        return p_crit(self.d, self.alpha)

    @property
    def a_scale(self) -> float:
        d, al = self.d, self.alpha
        ratio = gamma_fn((d + al) / 2) / gamma_fn((d - al) / 2)
        return self.A ** (2 / (d - al)) * 0.5 * ratio ** (-1 / al)

    @property
    def tail_constant(self) -> float:
        """Limit of |x|^(d-alpha) u(x) as |x| -> infinity."""
        return self.A * self.a_scale ** (-(self.d - self.alpha))

    def profile(self, r):
        """u as a function of the distance r = |x - c|."""
        r = np.asarray(r, dtype=float)
        out = self.A / (1.0 + (self.a_scale * r) ** 2) ** ((self.d - self.alpha) / 2)
        return float(out) if out.ndim == 0 else out


def _radii(x, center, d):
    x = np.asarray(x, dtype=float)
    diff = x - np.asarray(center, dtype=float)
    if d == 1 and diff.ndim <= 1 and (diff.ndim == 0 or diff.shape[-1] != 1):
        r = np.abs(diff)
    else:
        if diff.shape[-1] != d:
            raise DomainError(f"points must have {d} coordinates")
        r = np.linalg.norm(diff, axis=-1)
    return r


def eval_family(params: SteadyStateParams, x):
    """u_{c,A}(x); ``x`` is a point or an (n, d) array of points."""
    return params.profile(_radii(x, params.c, params.d))


def family_alpha2(A, d, r):
    """The classical alpha = 2 bubble A (d(d-2))^((d-2)/2) / (d(d-2) + (A^(2/(d-2)) r)^2)^((d-2)/2)."""
    r = np.asarray(r, dtype=float)
    k = d * (d - 2.0)
    return A * k ** ((d - 2) / 2) / (k + (A ** (2 / (d - 2)) * r) ** 2) ** ((d - 2) / 2)


def singular_coefficient(d: int, alpha: float) -> float:
    """[2^alpha (Gamma((d+alpha)/4)/Gamma((d-alpha)/4))^2]^(1/(p-1))."""
    p = p_crit(d, alpha)
    base = 2.0**alpha * (gamma_fn((d + alpha) / 4) / gamma_fn((d - alpha) / 4)) ** 2
    return base ** (1 / (p - 1))


def eval_singular(d: int, alpha: float, x):
    """Singular solution coefficient * |x|^(-(d-alpha)/2); x = 0 is a domain error."""
    r = _radii(x, np.zeros(d), d)
    if np.any(r == 0):
        raise DomainError("singular solution is undefined at the origin")
    out = singular_coefficient(d, alpha) * r ** (-(d - alpha) / 2)
    return float(out) if np.ndim(out) == 0 else out


def kelvin(u, center, d: int, alpha: float, x) -> float:
    """|x-c|^(-(d-alpha)) u(c + (x-c)/|x-c|^2) for a point-valued handle ``u``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = np.atleast_1d(np.asarray(center, dtype=float))
    diff = x - c
    r2 = float(np.dot(diff, diff))
    if r2 == 0.0:
        raise DomainError("Kelvin transform is undefined at the center")
    return r2 ** (-(d - alpha) / 2) * u(c + diff / r2)


def kelvin_image(params: SteadyStateParams) -> SteadyStateParams:
    """The family member equal to the Kelvin transform of ``params`` about its center."""
    return SteadyStateParams(params.tail_constant, params.d, params.alpha, params.c)


def weight_exponent(d, alpha, p) -> float:
    """(d+alpha) - p(d-alpha): the power of |x| left over after a Kelvin transform."""
    return (d + alpha) - p * (d - alpha)


# ---------------------------------------------------------------------------
# Riesz residual


@dataclass
class ResidualReport:
    radii: np.ndarray
    u_values: np.ndarray
    potential: np.ndarray
    residuals: np.ndarray
    max_normalized: float
    scale: float

    def to_dict(self):
        return {
            "radii": self.radii.tolist(),
            "residuals": self.residuals.tolist(),
            "max_normalized_residual": self.max_normalized,
            "scale": self.scale,
        }


def _quad(f, a, b, **kw):
    kw.setdefault("limit", 400)
    kw.setdefault("epsabs", 1e-13)
    kw.setdefault("epsrel", 1e-10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, **kw)[:2]
    if not math.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
        raise NumericalError("Riesz quadrature did not converge", {"interval": (a, b), "value": val, "abserr": err})
    return val


def _riesz_1d(u, alpha, p, x):
    # weak singularity |y-x|^(alpha-1) handled by the algebraic quadrature weight
    up = lambda y: u(abs(y)) ** p
    total = _quad(up, x, x + 1.0, weight="alg", wvar=(alpha - 1.0, 0.0))
    total += _quad(up, x - 1.0, x, weight="alg", wvar=(0.0, alpha - 1.0))
    far = lambda y: up(y) * abs(y - x) ** (alpha - 1.0)
    for a, b in ((x + 1.0, x + 30.0), (x + 30.0, np.inf)):
        total += _quad(far, a, b)
    for a, b in ((x - 30.0, x - 1.0), (-np.inf, x - 30.0)):
        total += _quad(far, a, b)
    return total


def spherical_riesz_kernel(d, alpha, r, rho):
    """Integral over the unit sphere of |r e - rho w|^(alpha-d) dw, e a fixed unit vector."""
    s = (d - alpha) / 2
    if d == 3:
        if alpha == 1.0:
            return 2 * math.pi * math.log((r + rho) / abs(r - rho)) / (r * rho)
        return 2 * math.pi * ((r + rho) ** (alpha - 1) - abs(r - rho) ** (alpha - 1)) / (r * rho * (alpha - 1))
    M, m = max(r, rho), min(r, rho)
    mean = M ** (-2 * s) * special.hyp2f1(s, s - d / 2 + 1, d / 2, (m / M) ** 2)
    return sphere_area(d) * mean


def _riesz_radial(u, d, alpha, p, r):
    area = sphere_area(d)
    if r == 0.0:
        # kernel reduces to |S| rho^(alpha-d)
        g = lambda rho: area * rho ** (alpha - 1) * u(rho) ** p
        total = _quad(lambda rho: area * u(rho) ** p, 0.0, 1.0, weight="alg", wvar=(alpha - 1.0, 0.0))
        return total + _quad(g, 1.0, 30.0) + _quad(g, 30.0, np.inf)
    f = lambda rho: rho ** (d - 1) * u(rho) ** p * spherical_riesz_kernel(d, alpha, r, rho)
    total = 0.0
    # integrable singularity at rho = r sits on an interval endpoint
    edges = [0.0, 0.5 * r, r, 1.5 * r, max(2.0 * r, r + 1.0), r + 30.0, np.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        total += _quad(f, a, b)
    return total


def _tail_exponent(u, d):
    r1, r2 = 1e3, 1e4
    u1, u2 = u(r1), u(r2)
    if u1 <= 0 or u2 <= 0:
        return math.inf
    return -math.log(u2 / u1) / math.log(r2 / r1)


def riesz_residual(u, d: int, alpha: float, p: float, sample_radii) -> ResidualReport:
    """R(r) = u(r) - A(d,alpha) int u^p(y) |y - x|^(alpha-d) dy at |x| = r.

    ``u`` is a radial profile u(r). The normalised maximum is max |R| / u(0)
    (or max |R| if u(0) = 0).
    """
    const = float(riesz_constant(d, alpha))
    radii = np.asarray(sample_radii, dtype=float)
    if np.any(radii < 0):
        raise DomainError("sample radii must be non-negative")
    u0 = float(u(0.0))
    uvals = np.array([float(u(r)) for r in radii])
    if u0 == 0.0 and np.all(uvals == 0.0):
        z = np.zeros_like(radii)
        return ResidualReport(radii, uvals, z, z.copy(), 0.0, 0.0)
    decay = _tail_exponent(u, d)
    if not p * decay > alpha:
        raise ValidationError(f"u^p * |y|^(alpha-d) is not integrable at infinity (observed decay exponent {decay:.3g})")
    if d == 1:
        pot = np.array([const * _riesz_1d(u, alpha, p, r) for r in radii])
    else:
        pot = np.array([const * _riesz_radial(u, d, alpha, p, r) for r in radii])
    res = uvals - pot
    scale = abs(u0) if u0 != 0 else 1.0
    return ResidualReport(radii, uvals, pot, res, float(np.max(np.abs(res)) / scale), scale)


# ---------------------------------------------------------------------------
# Fourier side


def fourier_side_check(A: float, d: int, alpha: float, radii):
    """Both sides of the Fourier-transformed fixed-point equation at |xi| = r.

    lhs: the transform of u_{0,A}, i.e. A a^(d-alpha/2) pi^((d-alpha)/2)
         2/Gamma((d-alpha)/2) r^(-alpha/2) K_{alpha/2}(2 pi a r);
    rhs: (2 pi r)^(-alpha) (2 pi a)^d A^p B_{d+alpha}(2 pi a r), the product of
         the Riesz multiplier and the transform of u^p,
    where a = 1/a_scale. Returns an (n, 2) array of (lhs, rhs).
    """
    params = SteadyStateParams(A, d, alpha)
    a = 1.0 / params.a_scale
    p = params.p
    out = []
    for r in np.atleast_1d(np.asarray(radii, dtype=float)):
        if not r > 0:
            raise DomainError("fourier_side_check needs r > 0")
        z = 2 * math.pi * a * r
        lhs = A * a ** (d - alpha / 2) * math.pi ** ((d - alpha) / 2) * 2 / gamma_fn((d - alpha) / 2) * r ** (-alpha / 2) * bessel_k(alpha / 2, z)
        rhs = (2 * math.pi * r) ** (-alpha) * (2 * math.pi * a) ** d * A**p * b_kernel(d + alpha, d, z)
        out.append((lhs, rhs))
    return np.array(out)


def fourier_transform_radial(profile, d: int, r: float) -> float:
    """Direct transform int exp(-2 pi i x.xi) u(|x|) dx at |xi| = r (d = 1 or 3)."""
    k = 2 * math.pi * r
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if d == 1:
            val = integrate.quad(profile, 0, np.inf, weight="cos", wvar=k, limlst=200)[0]
            return 2 * val
        if d == 3:
            val = integrate.quad(lambda x: x * profile(x), 0, np.inf, weight="sin", wvar=k, limlst=200)[0]
            return 4 * math.pi * val / k
    raise DomainError("direct transform implemented for d in {1, 3}")
