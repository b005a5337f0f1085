"""Dirichlet problem for Delta_alpha in a ball.

Poisson and Green kernels of the ball, exit-time Monte Carlo, a Nystrom
solver for u = int_B G(x, y) F(u(y)) dy (d = 1, and d = 2 via a radial
reduction), the moving-plane reflection sweep and the boundary-exponent fit.

Normalisations: C_poisson is fixed by requiring the exit law from the centre
to have unit mass; c_green by matching the diagonal singularity of G to the
Riesz kernel A(d, alpha) |x - y|^(alpha - d), which gives
c = Gamma(d/2) / (2^alpha pi^(d/2) Gamma(alpha/2)^2) (continued to d <= alpha).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericalError, ValidationError
from .special_functions import gamma_fn, sphere_area
from .stable_process import make_rng, sample_increments


# ---------------------------------------------------------------------------
# kernels


def poisson_constant_closed_form(alpha: float, d: int) -> float:
    """Gamma(d/2) pi^(-d/2-1) sin(pi alpha/2)."""
    return gamma_fn(d / 2) * math.pi ** (-d / 2 - 1) * math.sin(math.pi * alpha / 2)


def calibrate_poisson_constant(alpha: float, d: int) -> float:
    """C such that the exit law from the centre of the unit ball has mass 1.

    The mass is C |S^{d-1}| int_1^inf (rho^2 - 1)^(-alpha/2) rho^(-1) d rho.
    """
    f = lambda rho: rho ** (-1.0) * (rho + 1.0) ** (-alpha / 2)
    near, _ = integrate.quad(f, 1.0, 2.0, weight="alg", wvar=(-alpha / 2, 0.0), epsabs=0, epsrel=1e-13)
    far, _ = integrate.quad(lambda rho: rho ** (-1.0) * (rho * rho - 1.0) ** (-alpha / 2), 2.0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    return 1.0 / (sphere_area(d) * (near + far))


def green_constant(alpha: float, d: int) -> float:
    """Gamma(d/2) / (2^alpha pi^(d/2) Gamma(alpha/2)^2)."""
    return gamma_fn(d / 2) / (2.0**alpha * math.pi ** (d / 2) * gamma_fn(alpha / 2) ** 2)


@dataclass(frozen=True)
class BallKernelParams:
    alpha: float
    d: int
    radius: float = 1.0
    center: tuple = None
    C_poisson: float = None
    c_green: float = None

    def __post_init__(self):
        errors = []
        if not 0 < self.alpha < 2:
            errors.append(f"alpha must lie in (0,2) for the ball kernels, got {self.alpha!r}")
        if not (isinstance(self.d, (int, np.integer)) and 1 <= self.d <= 3):
            errors.append(f"d must be 1, 2 or 3, got {self.d!r}")
        if not self.radius > 0:
            errors.append("radius must be positive")
        if errors:
            raise ValidationError("; ".join(errors), errors)
        center = (0.0,) * self.d if self.center is None else tuple(float(v) for v in np.atleast_1d(self.center))
        if len(center) != self.d:
            raise ValidationError(f"center must have {self.d} coordinates")
        object.__setattr__(self, "center", center)
        if self.C_poisson is None:
            object.__setattr__(self, "C_poisson", calibrate_poisson_constant(self.alpha, self.d))
        if self.c_green is None:
            object.__setattr__(self, "c_green", green_constant(self.alpha, self.d))

    def to_dict(self):
        return {"alpha": self.alpha, "d": self.d, "radius": self.radius, "center": list(self.center),
                "C_poisson": self.C_poisson, "c_green": self.c_green}


def _pts(x, d):
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != d:
        raise DomainError(f"points must have {d} coordinates")
    return x


def poisson_kernel(params: BallKernelParams, x, y):
    """C [(R^2 - |x-c|^2) / (|y-c|^2 - R^2)]^(alpha/2) |x - y|^(-d)."""
    d, R = params.d, params.radius
    c = np.asarray(params.center)
    x, y = _pts(x, d), _pts(y, d)
    rx2 = np.sum((x - c) ** 2, axis=-1)
    ry2 = np.sum((y - c) ** 2, axis=-1)
    if np.any(rx2 >= R * R) or np.any(ry2 <= R * R):
        raise DomainError("poisson_kernel needs x inside and y outside the ball")
    dist = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    out = params.C_poisson * ((R * R - rx2) / (ry2 - R * R)) ** (params.alpha / 2) * dist ** (-d)
    return float(out) if np.ndim(out) == 0 else out


def poisson_mass(params: BallKernelParams, x) -> float:
    """int_{|y-c|>R} P(x, y) dy, by a radial quadrature of the exact spherical
    mean of |x - y|^(-d), which is rho^(2-d) / (rho^2 - |x-c|^2)."""
    d, R, al = params.d, params.radius, params.alpha
    x = _pts(x, d).reshape(d)
    s2 = float(np.sum((x - np.asarray(params.center)) ** 2))
    if s2 >= R * R:
        raise DomainError("x must lie inside the ball")
    area = sphere_area(d)
    pref = params.C_poisson * area * (R * R - s2) ** (al / 2)
    g = lambda rho: rho * (rho + R) ** (-al / 2) / (rho * rho - s2)
    near, _ = integrate.quad(g, R, 2 * R, weight="alg", wvar=(-al / 2, 0.0), epsabs=0, epsrel=1e-13)
    far, _ = integrate.quad(lambda rho: rho * (rho * rho - R * R) ** (-al / 2) / (rho * rho - s2), 2 * R, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return pref * (near + far)


def _inner_integral(alpha, d, w):
    """int_0^w r^(alpha/2 - 1) (1 + r)^(-d/2) dr for w >= 0 (array)."""
    w = np.asarray(w, dtype=float)
    a, b = alpha / 2, d / 2
    out = np.zeros_like(w)
    pos = w > 0
    wp = w[pos]
    if b > a:
        z = wp / (1 + wp)
        out[pos] = special.betainc(a, b - a, z) * special.beta(a, b - a)
    elif b == a:
        if a == 0.5:
            out[pos] = 2 * np.arcsinh(np.sqrt(wp))
        else:
            out[pos] = wp**a / a * special.hyp2f1(b, a, a + 1, -wp)
    else:
        out[pos] = wp**a / a * special.hyp2f1(b, a, a + 1, -wp)
    out[np.isposinf(w)] = np.inf if b <= a else special.beta(a, b - a)
    return out


def green_function(params: BallKernelParams, x, y):
    """c |x - y|^(alpha - d) int_0^w r^(alpha/2-1) (1+r)^(-d/2) dr,
    w = (R^2 - |x-c|^2)(R^2 - |y-c|^2) / (R^2 |x - y|^2).

    Zero when either point is outside the ball. On the diagonal returns inf
    for d >= alpha and the finite limit c (2/(alpha-d)) ((R^2-|x-c|^2)/R)^(alpha-d)
    for d < alpha.
    """
    d, R, al = params.d, params.radius, params.alpha
    c = np.asarray(params.center)
    x, y = _pts(x, d), _pts(y, d)
    x, y = np.broadcast_arrays(x, y)
    sx = R * R - np.sum((x - c) ** 2, axis=-1)
    sy = R * R - np.sum((y - c) ** 2, axis=-1)
    r2 = np.sum((x - y) ** 2, axis=-1)
    inside = (sx > 0) & (sy > 0)
    out = np.zeros(np.shape(r2))
    off = inside & (r2 > 0)
    w = sx[off] * sy[off] / (R * R * r2[off])
    out[off] = params.c_green * r2[off] ** ((al - d) / 2) * _inner_integral(al, d, w)
    diag = inside & (r2 == 0)
    if np.any(diag):
        out[diag] = np.inf if d >= al else params.c_green * 2 / (al - d) * (sx[diag] / R) ** (al - d)
    return float(out) if out.ndim == 0 else out


def expected_exit_time(alpha: float, d: int, x, radius: float = 1.0) -> float:
    """E_x tau = Gamma(d/2) (R^2 - |x|^2)^(alpha/2) / (2^alpha Gamma(1+alpha/2) Gamma((d+alpha)/2))."""
    s2 = float(np.sum(np.asarray(x, dtype=float) ** 2))
    if s2 >= radius * radius:
        return 0.0
    return gamma_fn(d / 2) * (radius**2 - s2) ** (alpha / 2) / (2.0**alpha * gamma_fn(1 + alpha / 2) * gamma_fn((d + alpha) / 2))


def green_mass(params: BallKernelParams, x) -> float:
    """int_B G(x, y) dy by quadrature (d = 1 on the interval, d >= 2 in polar
    coordinates around the centre with an exact treatment of the diagonal).

    Relative accuracy is about 1e-8, limited by rounding in the kernel.
    """
    d, R = params.d, params.radius
    x = _pts(x, d).reshape(d)
    c = np.asarray(params.center)
    if d == 1:
        xi = float(x[0])
        al = params.alpha
        total = 0.0
        if al < 1:
            # factor out the |x - y|^(alpha - 1) diagonal singularity into the weight
            g = lambda y: green_function(params, xi, y) * abs(xi - y) ** (1 - al) if y != xi else 0.0
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                total += integrate.quad(g, c[0] - R, xi, weight="alg", wvar=(0.0, al - 1), epsabs=1e-13, epsrel=1e-10, limit=400)[0]
                total += integrate.quad(g, xi, c[0] + R, weight="alg", wvar=(al - 1, 0.0), epsabs=1e-13, epsrel=1e-10, limit=400)[0]
            return total
        g = lambda y: green_function(params, xi, y)
        for a, b in ((c[0] - R, xi), (xi, c[0] + R)):
            total += integrate.quad(g, a, b, epsabs=1e-13, epsrel=1e-11, limit=400)[0]
        return total
    # polar coordinates centred at x: y = x + t omega, t up to the sphere
    nodes, weights = _sphere_design(d)
    total = 0.0
    for om, wt in zip(nodes, weights):
        b = float(np.dot(x - c, om))
        t_max = -b + math.sqrt(b * b + R * R - float(np.sum((x - c) ** 2)))
        f = lambda t: t ** (d - 1) * green_function(params, x, x + t * om)
        total += wt * integrate.quad(f, 0.0, t_max, epsabs=1e-13, epsrel=1e-10, limit=200)[0]
    return sphere_area(d) * total


def _sphere_design(d, n=64):
    if d == 2:
        th = 2 * math.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(n, 1.0 / n)
    t, wt = np.polynomial.legendre.leggauss(n // 4)
    ph = 2 * math.pi * (np.arange(n // 2) + 0.5) / (n // 2)
    T, P = np.meshgrid(t, ph, indexing="ij")
    s = np.sqrt(1 - T * T)
    nodes = np.column_stack([(s * np.cos(P)).ravel(), (s * np.sin(P)).ravel(), T.ravel()])
    weights = (wt[:, None] * np.full(n // 2, 1.0 / (n // 2))[None, :]).ravel() / 2
    return nodes, weights


def dirichlet_decomposition_gap(params: BallKernelParams, x: float, y: float) -> float:
    """d = 1, alpha < 1: A |x-y|^(alpha-1) - G(x,y) - int_{|z|>R} P(x,z) A |z-y|^(alpha-1) dz.

    The Riesz kernel splits into the Green kernel plus the harmonic extension
    of its exterior values, which ties C_poisson and c_green together.
    """
    from .special_functions import riesz_constant

    if params.d != 1 or not params.alpha < 1:
        raise DomainError("decomposition check implemented for d = 1, alpha < 1")
    A = float(riesz_constant(1, params.alpha))
    R, c = params.radius, params.center[0]
    al = params.alpha
    x, y = float(x), float(y)
    pk = lambda z: params.C_poisson * ((R * R - (x - c) ** 2) / ((z - c) ** 2 - R * R)) ** (al / 2) / abs(x - z)
    # (z^2 - R^2)^(-alpha/2) singular at z = +-R
    right = lambda z: params.C_poisson * (R * R - (x - c) ** 2) ** (al / 2) * (z - c + R) ** (-al / 2) / abs(x - z) * A * abs(z - y) ** (al - 1)
    left = lambda z: params.C_poisson * (R * R - (x - c) ** 2) ** (al / 2) * (R - (z - c)) ** (-al / 2) / abs(x - z) * A * abs(z - y) ** (al - 1)
    ext = integrate.quad(right, c + R, c + 2 * R, weight="alg", wvar=(-al / 2, 0.0), epsabs=0, epsrel=1e-12)[0]
    ext += integrate.quad(left, c - 2 * R, c - R, weight="alg", wvar=(0.0, -al / 2), epsabs=0, epsrel=1e-12)[0]
    ext += integrate.quad(lambda z: pk(z) * A * abs(z - y) ** (al - 1), c + 2 * R, np.inf, epsabs=0, epsrel=1e-12, limit=200)[0]
    ext += integrate.quad(lambda z: pk(z) * A * abs(z - y) ** (al - 1), -np.inf, c - 2 * R, epsabs=0, epsrel=1e-12, limit=200)[0]
    return A * abs(x - y) ** (al - 1) - green_function(params, x, y) - ext


# ---------------------------------------------------------------------------
# exit Monte Carlo


@dataclass
class ExitSample:
    tau_fine: np.ndarray
    tau_coarse: np.ndarray
    exit_positions: np.ndarray
    dt: float
    order: float

    @property
    def tau_extrapolated(self) -> np.ndarray:
        return self.tau_fine + (self.tau_fine - self.tau_coarse) / (2.0**self.order - 1.0)

    def mean_exit_time(self):
        """(extrapolated mean, standard error, fine-step mean, coarse-step mean)."""
        t = self.tau_extrapolated
        n = t.size
        return float(t.mean()), float(t.std(ddof=1) / math.sqrt(n)), float(self.tau_fine.mean()), float(self.tau_coarse.mean())


def simulate_exit(alpha: float, d: int, x, n_paths: int, dt: float, seed: int,
                  radius: float = 1.0, order: float | None = None, chunk: int = 20000, max_time: float = 1e3) -> ExitSample:
    """First exit of the unit ball, monitored every dt and every 2 dt on the same paths.

    Exit is declared at the first monitoring time the path is outside. The
    coarse (2 dt) path is the fine path read at even steps, so the two
    estimates are coupled and Richardson extrapolation with the given order
    (default min(1, 1/alpha)) removes the leading monitoring bias.
    """
    q = min(1.0, 1.0 / alpha) if order is None else order
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tf_all, tc_all, pos_all = [], [], []
    for k, start in enumerate(range(0, n_paths, chunk)):
        n = min(chunk, n_paths - start)
        rng = make_rng(seed, k)
        pos = np.tile(x, (n, 1))
        tf = np.full(n, np.nan)
        tc = np.full(n, np.nan)
        exit_pos = np.full((n, d), np.nan)
        alive = np.arange(n)  # paths where the coarse exit is still pending
        step = 0
        while alive.size and step * dt < max_time:
            step += 1
            pos[alive] += sample_increments(alpha, dt, d, rng, alive.size)
            out = np.sum(pos[alive] ** 2, axis=1) >= radius * radius
            new_f = alive[out & np.isnan(tf[alive])]
            tf[new_f] = step * dt
            exit_pos[new_f] = pos[new_f]
            if step % 2 == 0:
                done = alive[out]
                tc[done] = step * dt
                alive = alive[~out]
        if alive.size:
            raise NumericalError("exit simulation exceeded max_time", {"pending": int(alive.size)})
        tf_all.append(tf)
        tc_all.append(tc)
        pos_all.append(exit_pos)
    return ExitSample(np.concatenate(tf_all), np.concatenate(tc_all), np.concatenate(pos_all), dt, q)


# ---------------------------------------------------------------------------
# ball nonlinearity and solver


class FKind(str, enum.Enum):
    AFFINE = "Affine"
    SATURATING = "Saturating"


@dataclass(frozen=True)
class BallNonlinearity:
    """Non-decreasing F on [0, inf).

    Affine:      F(u) = a + b u
    Saturating:  F(u) = a + b u / (1 + u)
    Lipschitz constant b in both cases.
    """

    kind: FKind = FKind.AFFINE
    a: float = 0.1
    b: float = 0.1

    def __post_init__(self):
        errors = []
        try:
            object.__setattr__(self, "kind", FKind(self.kind))
        except ValueError:
            errors.append(f"unknown F kind {self.kind!r}")
        if not self.a >= 0:
            errors.append("a must be non-negative")
        if not self.b >= 0:
            errors.append("b must be non-negative (F non-decreasing)")
        if self.a == 0 and self.b == 0:
            errors.append("F is identically zero")
        if errors:
            raise ValidationError("; ".join(errors), errors)

    @property
    def lipschitz(self) -> float:
        return self.b

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is FKind.AFFINE:
            return self.a + self.b * u
        return self.a + self.b * u / (1.0 + np.abs(u))

    def to_dict(self):
        return {"kind": self.kind.value, "a": self.a, "b": self.b}


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _gauss(a, b):
    m, h = 0.5 * (a + b), 0.5 * (b - a)
    return m + h * _GL_X, h * _GL_W


def _graded_pieces(a, b, toward, levels=16, ratio=0.25):
    """Split [a, b] geometrically toward the endpoint ``toward`` (a or b),
    stopping once pieces reach rounding scale."""
    pieces = []
    lo, hi = a, b
    floor = 1e3 * np.finfo(float).eps * max(1.0, abs(toward))
    for _ in range(levels):
        if hi - lo < floor / ratio:
            break
        if toward == a:
            mid = lo + ratio * (hi - lo)
            pieces.append((mid, hi))
            hi = mid
        else:
            mid = hi - ratio * (hi - lo)
            pieces.append((lo, mid))
            lo = mid
    pieces.append((lo, hi))
    return pieces


def _element_rules(nodes, singular_at):
    """Quadrature points/weights/(element index) covering [nodes[0], nodes[-1]],
    graded toward ``singular_at`` and toward the mesh ends."""
    ys, ws, els = [], [], []
    end_a, end_b = nodes[0], nodes[-1]
    for k in range(len(nodes) - 1):
        a, b = nodes[k], nodes[k + 1]
        if a < singular_at < b:
            subs = [(a, singular_at, singular_at), (singular_at, b, singular_at)]
        else:
            tw = a if (abs(a - singular_at) < 1e-15 or a == end_a) else (b if (abs(b - singular_at) < 1e-15 or b == end_b) else None)
            subs = [(a, b, tw)]
        for lo, hi, tw in subs:
            pieces = _graded_pieces(lo, hi, tw) if tw is not None else [(lo, hi)]
            for p, q in pieces:
                y, w = _gauss(p, q)
                ys.append(y)
                ws.append(w)
                els.append(np.full(y.size, k))
    return np.concatenate(ys), np.concatenate(ws), np.concatenate(els)


def _hat_weights(nodes, y, w, els, kernel_vals):
    """Accumulate int K(y) phi_j(y) dy for the piecewise-linear hat basis."""
    n = len(nodes)
    a, b = nodes[els], nodes[els + 1]
    t = (y - a) / (b - a)
    kw = kernel_vals * w
    row = np.zeros(n)
    np.add.at(row, els, kw * (1 - t))
    np.add.at(row, els + 1, kw * t)
    return row


def _radial_kernel_2d(params, r, rho):
    """int_0^{2 pi} G(r e_1, rho e_theta) d theta, vectorised over rho."""
    rho = np.asarray(rho, dtype=float)
    th_parts = _graded_pieces(0.0, math.pi, 0.0, levels=30, ratio=0.3)
    th = np.concatenate([_gauss(p, q)[0] for p, q in th_parts])
    tw = np.concatenate([_gauss(p, q)[1] for p, q in th_parts])
    x = np.array([r, 0.0])
    ys = np.stack([rho[:, None] * np.cos(th)[None, :], rho[:, None] * np.sin(th)[None, :]], axis=-1)
    g = green_function(params, x, ys)
    return 2.0 * (g * tw[None, :]).sum(axis=1)


def _kernel_row(params, nodes, x):
    """Nystrom weights W_j(x) with u(x) = sum_j W_j(x) F(u_j)."""
    if params.d == 1:
        y, w, els = _element_rules(nodes, x)
        return _hat_weights(nodes, y, w, els, green_function(params, x, y))
    y, w, els = _element_rules(nodes, abs(x))
    k = _radial_kernel_2d(params, abs(x), y) * y
    return _hat_weights(nodes, y, w, els, k)


def graded_mesh(n: int, d: int, grading: float = 3.0) -> np.ndarray:
    """Nodes on [-1, 1] (d = 1, symmetric) or [0, 1] (d = 2 radial), clustered
    toward the boundary like 1 - (1 - s)^grading."""
    s = np.linspace(0.0, 1.0, n + 1)
    half = 1.0 - (1.0 - s) ** grading
    if d == 1:
        return np.concatenate([-half[::-1], half[1:]])
    return half


@dataclass
class BallSolution:
    alpha: float
    d: int
    radial_grid: np.ndarray
    values: np.ndarray
    F_spec: BallNonlinearity
    symmetry_defect: float
    boundary_exponent: float | None = None
    iterations: int = 0
    monotone_iterates: bool = True
    lipschitz_bound: float = 0.0
    params: BallKernelParams = None
    _F_values: np.ndarray = field(default=None, repr=False)

    def evaluate(self, x) -> float:
        """Nystrom interpolation u(x) = int G(x, y) F(u(y)) dy."""
        x = float(x)
        if abs(x) >= 1.0:
            return 0.0
        return float(_kernel_row(self.params, self.radial_grid, x) @ self._F_values)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "d": self.d,
            "F": self.F_spec.to_dict(),
            "n_nodes": int(self.radial_grid.size),
            "symmetry_defect": self.symmetry_defect,
            "boundary_exponent": self.boundary_exponent,
            "iterations": self.iterations,
            "monotone_iterates": self.monotone_iterates,
            "lipschitz_bound": self.lipschitz_bound,
            "min_interior_value": float(np.min(self.values[np.abs(self.radial_grid) <= 0.99])),
        }


def solve_ball_steady(F_spec: BallNonlinearity, alpha: float, d: int, grid=None, n: int = 60,
                      tol: float = 1e-10, max_iter: int = 1000) -> BallSolution:
    """Fixed point of u = int_B G(x, y) F(u(y)) dy from u_0 = 0.

    The contraction condition Lip(F) * max_x int G(x, y) dy < 1 is checked on
    the discrete operator before iterating; a violation raises ValidationError.
    """
    if d not in (1, 2):
        raise ValidationError("the ball solver supports d = 1 and d = 2")
    params = BallKernelParams(alpha, d)
    nodes = graded_mesh(n, d) if grid is None else np.asarray(grid, dtype=float)
    W = np.array([_kernel_row(params, nodes, x) for x in nodes])
    row_sums = W.sum(axis=1)
    bound = F_spec.lipschitz * float(np.max(np.abs(row_sums)))
    if not bound < 1:
        raise ValidationError(f"contraction condition fails: Lip(F) * sup int G = {bound:.4g} >= 1", [f"lipschitz_bound={bound}"])
    u = np.zeros(nodes.size)
    monotone = True
    for it in range(1, max_iter + 1):
        new = W @ F_spec(u)
        if np.any(new < u - 1e-14 * max(1.0, float(np.max(np.abs(u))))):
            monotone = False
        change = float(np.max(np.abs(new - u)))
        u = new
        if change < tol:
            break
    else:
        raise NumericalError("ball fixed-point iteration did not converge", {"last_change": change, "iterations": max_iter})
    if d == 1:
        defect = float(np.max(np.abs(u - u[::-1])))
    else:
        defect = 0.0  # radial by construction
    sol = BallSolution(alpha, d, nodes, u, F_spec, defect, iterations=it, monotone_iterates=monotone,
                       lipschitz_bound=bound, params=params, _F_values=F_spec(u))
    return sol


def boundary_exponent(sol: BallSolution, eps_min: float = 1e-3, eps_max: float = 1e-1, n: int = 15):
    """Slope of log u(1 - eps) against log eps over [eps_min, eps_max].

    Returns (slope, eps array, values array).
    """
    eps = np.geomspace(eps_min, eps_max, n)
    vals = np.array([sol.evaluate(1.0 - e) for e in eps])
    if np.any(vals <= 0):
        raise ValidationError("non-positive values in the boundary fit window")
    slope = float(np.polyfit(np.log(eps), np.log(vals), 1)[0])
    sol.boundary_exponent = slope
    return slope, eps, vals


# ---------------------------------------------------------------------------
# moving planes


@dataclass
class SymmetryReport:
    lambda_sup: float
    lambdas: np.ndarray
    min_w: np.ndarray
    violations: list
    derivative_ok: bool
    tol: float

    def to_dict(self):
        return {"lambda_sup": self.lambda_sup, "violations": self.violations[:50], "n_violations": len(self.violations),
                "derivative_ok": self.derivative_ok, "tol": self.tol}


def ball_grid(n: int, d: int = 2):
    """Uniform node coordinates on [-1, 1] with n nodes per axis (n odd keeps 0 a node)."""
    ax = np.linspace(-1.0, 1.0, n)
    if d == 1:
        return ax, (ax,)
    mesh = np.meshgrid(*([ax] * d), indexing="ij")
    return ax, tuple(mesh)


def _bilinear(values, ax, pts):
    h = ax[1] - ax[0]
    n = ax.size
    d = values.ndim
    s = (pts - ax[0]) / h
    out = np.zeros(len(pts))
    base = np.floor(s).astype(int)
    frac = s - base
    import itertools

    for corner in itertools.product((0, 1), repeat=d):
        w = np.ones(len(pts))
        idx = []
        for k, c in enumerate(corner):
            i = base[:, k] + c
            w = w * (frac[:, k] if c else 1 - frac[:, k])
            idx.append(np.clip(i, 0, n - 1))
        valid = np.all([(base[:, k] + c >= 0) & (base[:, k] + c < n) for k, c in enumerate(corner)], axis=0)
        out += np.where(valid, w * values[tuple(idx)], 0.0)
    return out


def symmetry_diagnostic(values, ax, direction, tol: float | None = None, n_lambda: int | None = None) -> SymmetryReport:
    """Moving-plane sweep of u (gridded on ax^d, zero outside the unit ball).

    With e = direction and s = x.e, the reflection of x in the plane s = lambda
    is x^lambda = x + 2 (lambda - s) e. For each lambda in (-1, 0] the minimum
    of w = u(x^lambda) - u(x) over grid points with s < lambda inside the ball
    is recorded; lambda_sup is the largest lambda such that every swept value
    up to it has min w >= -tol. Axis-aligned directions sweep lambda on the
    half-grid so reflections are grid nodes; other directions interpolate
    bilinearly and skip reflections whose cell is not inside the ball. The derivative condition d u / d e >= -tol on the plane is
    checked by central differences.
    """
    values = np.asarray(values, dtype=float)
    d = values.ndim
    e = np.atleast_1d(np.asarray(direction, dtype=float))
    if e.shape != (d,) or not np.isclose(np.linalg.norm(e), 1.0):
        raise DomainError("direction must be a unit vector of the grid dimension")
    h = ax[1] - ax[0]
    mesh = np.meshgrid(*([ax] * d), indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=1)
    U = values.ravel()
    inside = np.sum(X**2, axis=1) < 1.0
    s = X @ e
    aligned = np.count_nonzero(np.abs(e) > 1e-12) == 1
    if tol is None:
        tol = 1e-12 * max(1.0, float(np.max(np.abs(U)))) if aligned else 4 * h * float(np.max(np.abs(np.gradient(values, h)))) * h
    if aligned:
        lambdas = np.arange(-1.0 + 0.5 * h, 0.0 + 0.25 * h, 0.5 * h)
        lambdas[-1] = 0.0
    else:
        lambdas = np.linspace(-1.0, 0.0, n_lambda or 101)[1:]
    min_w = np.empty(lambdas.size)
    violations = []
    for k, lam in enumerate(lambdas):
        sel = inside & (s < lam - 1e-12)
        if not np.any(sel):
            min_w[k] = 0.0
            continue
        xr = X[sel] + 2 * (lam - s[sel])[:, None] * e[None, :]
        if aligned:
            idx = np.rint((xr - ax[0]) / h).astype(int)
            ok = np.all((idx >= 0) & (idx < ax.size), axis=1)
            ur = np.zeros(len(xr))
            ur[ok] = values[tuple(idx[ok].T)]
        else:
            # keep reflections whose interpolation cell lies inside the ball
            base = ax[0] + h * np.floor((xr - ax[0]) / h)
            far = np.sqrt(np.sum((np.abs(base) + h * (base >= 0)) ** 2, axis=1))
            ok = far < 1.0
            ur = np.full(len(xr), np.inf)
            ur[ok] = _bilinear(values, ax, xr[ok])
        w = ur - U[sel]
        min_w[k] = float(np.min(w))
        if min_w[k] < -tol:
            bad = np.where(w < -tol)[0]
            for i in bad[np.argsort(w[bad])][:5]:
                violations.append({"lambda": float(lam), "x": X[sel][i].tolist(), "w": float(w[i])})
    failing = np.where(min_w < -tol)[0]
    if failing.size == 0:
        lam_sup = float(lambdas[-1])
    elif failing[0] == 0:
        lam_sup = -1.0
    else:
        lam_sup = float(lambdas[failing[0] - 1])
    # derivative condition along e on planes that are grid lines
    grad = np.stack(np.gradient(values, h), axis=-1).reshape(-1, d) @ e if d > 1 else np.gradient(values, h) * e[0]
    deriv_ok = True
    for lam in lambdas[(lambdas < -1e-12) & (lambdas <= lam_sup)]:
        on_plane = inside & (np.abs(s - lam) < 1e-9) & (np.sum(X**2, axis=1) < (1 - 2 * h) ** 2)
        if np.any(on_plane) and np.any(grad[on_plane] < -max(tol, h * h)):
            deriv_ok = False
            break
    return SymmetryReport(lam_sup, lambdas, min_w, violations, deriv_ok, tol)


def symmetry_defect_from_grid(values, ax) -> float:
    """max over radius classes of (max - min) of u on the grid; exact radius
    classes are the orbits of the grid's symmetry group."""
    values = np.asarray(values, dtype=float)
    mesh = np.meshgrid(*([ax] * values.ndim), indexing="ij")
    r2 = np.round(sum(m * m for m in mesh).ravel(), 12)
    U = values.ravel()
    order = np.argsort(r2, kind="stable")
    r2s, Us = r2[order], U[order]
    breaks = np.flatnonzero(np.diff(r2s)) + 1
    groups = np.split(Us, breaks)
    return float(max(g.max() - g.min() for g in groups))
