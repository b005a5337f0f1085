"""Time integration of u_t = Delta_alpha u + G(u) on a periodic box.

The scheme is first-order Lie splitting: an exact semigroup step in Fourier
space followed by an explicit Euler reaction step with a clamp at zero.
The step size contracts with the solution, dt = min(dt_max, theta / G'(|u|_inf)),
so that step-size collapse can certify a blow-up.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .frac_laplacian import GridField, fourier_multiply
from .nonlinearity import NonlinearitySpec


@dataclass(frozen=True)
class ProblemSpec:
    d: int
    alpha: float
    nonlinearity: NonlinearitySpec
    L: float
    N: int

    def __post_init__(self):
        errors = []
        if not 1 <= self.d <= 3:
            errors.append(f"d must be 1, 2 or 3, got {self.d!r}")
        if not 0 < self.alpha <= 2:
            errors.append(f"alpha out of (0,2]: {self.alpha!r}")
        if not self.L > 0:
            errors.append(f"L must be positive, got {self.L!r}")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 2 and not self.N & (self.N - 1)):
            errors.append(f"N must be a power of two, got {self.N!r}")
        if errors:
            raise ValidationError("; ".join(errors), errors)

    def empty_field(self) -> GridField:
        return GridField(self.d, self.L, self.N, np.zeros((self.N,) * self.d))

    def to_dict(self):
        return {"d": self.d, "alpha": self.alpha, "L": self.L, "N": self.N, "nonlinearity": self.nonlinearity.to_dict()}


class Tag(str, enum.Enum):
    BLEW_UP = "BlewUp"
    EXTINCT = "Extinct"
    UNDECIDED = "Undecided"


@dataclass
class RunControls:
    """Knobs of ``run``.

    theta:        dt = min(dt_max, theta / G'(|u|_inf))
    M_max:        blow-up threshold on |u|_inf
    dt_collapse:  required contraction of dt relative to its first value
    delta_ext:    extinction threshold relative to |phi|_inf
    final_window: fraction of the run (by step count) used for the
                  monotonicity test and the decay fit
    eta:          bound on the bootstrap quantity (see ``extinction_certificate``)
    snapshot_until / snapshot_every: store GridField copies at multiples of
                  ``snapshot_every`` up to ``snapshot_until`` (0 disables)
    """

    dt_max: float = 0.05
    theta: float = 0.05
    M_max: float = 1e6
    dt_collapse: float = 1e3
    delta_ext: float = 1e-3
    final_window: float = 0.2
    eta: float = 0.1
    max_steps: int = 2_000_000
    snapshot_until: float = 0.0
    snapshot_every: float = 0.0

    def __post_init__(self):
        errors = []
        for name in ("dt_max", "theta", "M_max", "dt_collapse", "delta_ext", "eta"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be positive")
        if not 0 < self.final_window <= 1:
            errors.append("final_window must lie in (0, 1]")
        if self.snapshot_until > 0 and not self.snapshot_every > 0:
            errors.append("snapshot_every must be positive when snapshots are requested")
        if errors:
            raise ValidationError("; ".join(errors), errors)


@dataclass
class SimOutcome:
    tag: Tag
    t_final: float
    supnorm_trace: np.ndarray  # columns (t, |u|_inf)
    t_blow_estimate: float | None = None
    decay_rate_estimate: float | None = None
    certificate: float | None = None
    decision_time: float | None = None
    diagnostics: dict = field(default_factory=dict)
    final_field: GridField | None = None
    snapshots: list = field(default_factory=list)  # [(t, GridField)]

    def to_dict(self):
        out = {
            "tag": self.tag.value,
            "t_final": self.t_final,
            "t_blow_estimate": self.t_blow_estimate,
            "decay_rate_estimate": self.decay_rate_estimate,
            "certificate": self.certificate,
            "decision_time": self.decision_time,
            "final_supnorm": float(self.supnorm_trace[-1, 1]),
            "n_steps": int(len(self.supnorm_trace) - 1),
        }
        out.update({k: v for k, v in self.diagnostics.items()})
        return out


# ---------------------------------------------------------------------------
# building blocks


def semigroup_apply(field: GridField, alpha: float, t: float) -> GridField:
    """P_t: multiply mode k by exp(-t (2 pi |k| / L)^alpha)."""
    if t < 0:
        raise DomainError("semigroup time must be non-negative")
    if t == 0:
        return field.with_values(field.values.copy())
    return fourier_multiply(field, lambda q: np.exp(-t * q**alpha))


def _reaction(values, G: NonlinearitySpec, dt):
    with np.errstate(over="ignore", invalid="ignore"):
        out = values + dt * G(np.maximum(values, 0.0))
    return np.maximum(out, 0.0)


def step(field: GridField, spec: ProblemSpec, dt: float) -> GridField:
    """One Lie-splitting step: u <- P_dt u, then u <- max(u + dt G(u), 0).

    Overflow is clipped to the largest double, which any blow-up threshold
    will flag.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    u = _Stepper(spec)(field.values, dt)
    return field.with_values(np.nan_to_num(u, nan=_HUGE, posinf=_HUGE))


_HUGE = float(np.finfo(float).max)


class _Stepper:
    """Reuses the semigroup multiplier while dt is unchanged."""

    def __init__(self, spec: ProblemSpec):
        from scipy import fft
        from .frac_laplacian import _wavenumber_norm, fft_workers

        self.spec = spec
        self.fft = fft
        self.workers = fft_workers()
        self.qa = _wavenumber_norm(spec.d, spec.L, spec.N) ** spec.alpha
        self.axes = tuple(range(spec.d))
        self._dt = None
        self._mult = None

    def __call__(self, values: np.ndarray, dt: float) -> np.ndarray:
        if dt != self._dt:
            self._dt, self._mult = dt, np.exp(-dt * self.qa)
        spec = self.fft.rfftn(values, axes=self.axes, workers=self.workers)
        spec *= self._mult
        u = self.fft.irfftn(spec, s=values.shape, axes=self.axes, workers=self.workers)
        with np.errstate(over="ignore", invalid="ignore"):
            return _reaction(np.maximum(u, 0.0), self.spec.nonlinearity, dt)


def _step_size(G: NonlinearitySpec, sup: float, c: RunControls) -> float:
    slope = G.derivative(sup) if math.isfinite(sup) else math.inf
    return c.dt_max if slope <= 0 else min(c.dt_max, c.theta / slope)


# ---------------------------------------------------------------------------
# classification helpers


def fit_blowup_time(trace: np.ndarray, beta: float, frac: float = 0.2) -> float:
    """Extrapolate the zero of |u|_inf^(-beta), linear in t for ODE-type blow-up."""
    n = len(trace)
    k = max(3, int(math.ceil(frac * n)))
    t, s = trace[-k:, 0], trace[-k:, 1]
    y = s ** (-beta)
    t0 = t.mean()
    slope, intercept = np.polyfit(t - t0, y, 1)
    if slope >= 0:
        return float(t[-1])
    return float(t0 - intercept / slope)


def fit_decay_rate(trace: np.ndarray, frac: float = 0.2) -> float:
    """Slope r of log |u|_inf = -r log t + const over the final window."""
    n = len(trace)
    k = max(3, int(math.ceil(frac * n)))
    t, s = trace[-k:, 0], trace[-k:, 1]
    ok = (t > 0) & (s > 0)
    if ok.sum() < 3 or np.ptp(np.log(t[ok])) == 0:
        return math.nan
    slope = np.polyfit(np.log(t[ok]), np.log(s[ok]), 1)[0]
    return float(-slope)


def extinction_certificate(G: NonlinearitySpec, sup: float, t: float, rate: float) -> float:
    """beta * (G(m)/m) * t / (rate * beta - 1) with m = |u(t)|_inf.

    If the free evolution from time t decays at least like (s/t)^(-rate),
    comparison with h(s) P_{s-t} u(t), h' = (G(m)/m^(1+beta)) h^(1+beta) |P u|^beta,
    shows u stays below (1 - q)^(-1/beta) P_{s-t} u(t) whenever this quantity
    q is < 1, hence tends to zero. Returns inf when rate * beta <= 1.
    """
    if sup == 0:
        return 0.0
    b = G.beta
    if not rate * b > 1:
        return math.inf
    return b * G.ratio(sup) * t / (rate * b - 1)


def _monotone_tail(trace, frac):
    n = len(trace)
    k = max(2, int(math.ceil(frac * n)))
    s = trace[-k:, 1]
    return bool(np.all(np.diff(s) <= 1e-12 * s[:-1]))


def torus_mean_blowup_time(field: GridField, G: NonlinearitySpec) -> float:
    """ODE blow-up time of the spatial mean; every positive datum on the torus
    blows up no later than this (Jensen: d mean/dt >= G(mean))."""
    from .nonlinearity import blowup_time_ode

    return blowup_time_ode(G, float(np.mean(field.values)))


# ---------------------------------------------------------------------------
# driver


def run(spec: ProblemSpec, phi: GridField, T_max: float, controls: RunControls | None = None) -> SimOutcome:
    """Integrate from phi up to T_max and classify the outcome.

    BlewUp:   |u|_inf > M_max and dt has contracted by >= dt_collapse.
    Extinct:  |u|_inf monotone non-increasing over the final window and either
              |u(T)|_inf < delta_ext |phi|_inf or the bootstrap certificate
              of ``extinction_certificate`` is <= eta.
    Undecided otherwise.
    """
    c = controls or RunControls()
    if phi.d != spec.d or phi.N != spec.N or phi.L != spec.L:
        raise ValidationError("initial field does not match the problem grid")
    if np.any(phi.values < 0):
        raise ValidationError("initial datum must be non-negative")
    G = spec.nonlinearity
    u = phi.values.copy()
    sup0 = float(np.max(u))
    diag = {"torus_mean_blowup_time": torus_mean_blowup_time(phi, G)}
    snaps = []
    next_snap = 0.0
    if c.snapshot_until > 0:
        snaps.append((0.0, phi.with_values(u.copy())))
        next_snap = c.snapshot_every
    if sup0 == 0.0:
        trace = np.array([[0.0, 0.0], [T_max, 0.0]])
        return SimOutcome(Tag.EXTINCT, T_max, trace, decay_rate_estimate=math.inf, certificate=0.0,
                          decision_time=0.0, diagnostics=diag, final_field=phi.with_values(u), snapshots=snaps)

    stepper = _Stepper(spec)
    t, sup = 0.0, sup0
    times, sups = [0.0], [sup0]
    dt0 = None
    tag = Tag.UNDECIDED
    for _ in range(c.max_steps):
        if t >= T_max * (1 - 1e-14):
            break
        dt = _step_size(G, sup, c)
        dt = min(dt, T_max - t)
        if snaps and next_snap <= c.snapshot_until + 1e-12 and t + dt > next_snap - 1e-12:
            dt = next_snap - t
        if dt0 is None:
            dt0 = dt
        u = stepper(u, dt)
        t += dt
        sup = float(np.max(u))
        if not math.isfinite(sup):
            sup = math.inf
        times.append(t)
        sups.append(sup)
        if snaps and next_snap <= c.snapshot_until + 1e-12 and abs(t - next_snap) <= 1e-12 * max(1.0, t):
            snaps.append((next_snap, phi.with_values(u.copy())))
            next_snap = round(next_snap + c.snapshot_every, 12)
        if sup > c.M_max and dt0 / _step_size(G, sup, c) >= c.dt_collapse:
            tag = Tag.BLEW_UP
            break
    trace = np.column_stack([times, sups])
    diag["dt_first"] = dt0
    out = SimOutcome(tag, t, trace, diagnostics=diag, snapshots=snaps)
    if tag is Tag.BLEW_UP:
        finite = trace[np.isfinite(trace[:, 1])]
        out.t_blow_estimate = fit_blowup_time(finite, G.beta, c.final_window)
        out.decision_time = t
        return out
    out.final_field = phi.with_values(u)
    out.decay_rate_estimate = fit_decay_rate(trace, c.final_window)
    out.certificate = extinction_certificate(G, sup, t, out.decay_rate_estimate)
    diag["relative_supnorm"] = sup / sup0
    if _monotone_tail(trace, c.final_window) and (sup < c.delta_ext * sup0 or out.certificate <= c.eta):
        out.tag = Tag.EXTINCT
        out.decision_time = _extinction_decision_time(trace, G, c, sup0)
    return out


def _extinction_decision_time(trace, G, c, sup0, n_checks: int = 200):
    """Earliest recorded time from which the extinction test keeps passing."""
    n = len(trace)
    idx = np.unique(np.linspace(max(3, n // 20), n - 1, min(n_checks, n)).astype(int))
    passing = []
    for i in idx:
        sub = trace[: i + 1]
        rate = fit_decay_rate(sub, c.final_window)
        m, t = sub[-1, 1], sub[-1, 0]
        ok = _monotone_tail(sub, c.final_window) and (m < c.delta_ext * sup0 or extinction_certificate(G, m, t, rate) <= c.eta)
        passing.append(ok)
    passing = np.array(passing)
    if not passing[-1]:
        return None
    k = len(passing) - 1
    while k > 0 and passing[k - 1]:
        k -= 1
    return float(trace[idx[k], 0])


# ---------------------------------------------------------------------------
# comparison experiments


@dataclass
class OrderingReport:
    t_end: float
    max_violation: float
    n_steps: int
    holds: bool

    def to_dict(self):
        return {"t_end": self.t_end, "max_violation": self.max_violation, "n_steps": self.n_steps, "holds": self.holds}


def ordering_check(spec: ProblemSpec, lower: GridField, upper: GridField, T_max: float,
                   controls: RunControls | None = None, tol: float = 1e-9) -> OrderingReport:
    """Co-step two ordered data with a shared dt sequence and record the worst
    max(u_lower - u_upper, 0), relative to |u_upper|_inf, until T_max or until
    the upper solution passes M_max."""
    c = controls or RunControls()
    if np.any(lower.values > upper.values):
        raise ValidationError("ordering_check needs lower <= upper pointwise at t = 0")
    stepper = _Stepper(spec)
    G = spec.nonlinearity
    a, b = lower.values.copy(), upper.values.copy()
    t, worst, n = 0.0, 0.0, 0
    while t < T_max * (1 - 1e-14) and n < c.max_steps:
        sup = float(np.max(b))
        if not sup <= c.M_max:
            break
        dt = min(_step_size(G, max(sup, float(np.max(a))), c), T_max - t)
        a, b = stepper(a, dt), stepper(b, dt)
        t += dt
        n += 1
        scale = max(float(np.max(b)), 1e-300)
        worst = max(worst, float(np.max(a - b)) / scale)
    return OrderingReport(t, max(worst, 0.0), n, worst <= tol)


@dataclass
class DichotomyResult:
    eps: float
    lower: SimOutcome
    upper: SimOutcome
    ordering: list

    def to_dict(self):
        return {
            "eps": self.eps,
            "lower": self.lower.to_dict(),
            "upper": self.upper.to_dict(),
            "ordering": [o.to_dict() for o in self.ordering],
        }


def dichotomy_experiment(spec: ProblemSpec, base: GridField, eps: float, T_max: float,
                         controls: RunControls | None = None, check_ordering: bool = True) -> DichotomyResult:
    """Run (1-eps) base and (1+eps) base; optionally co-step each against base."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    lo = base.with_values((1 - eps) * base.values)
    hi = base.with_values((1 + eps) * base.values)
    lower = run(spec, lo, T_max, controls)
    upper = run(spec, hi, T_max, controls)
    ordering = []
    if check_ordering:
        ordering.append(ordering_check(spec, lo, base, T_max, controls))
        ordering.append(ordering_check(spec, base, hi, T_max, controls))
    return DichotomyResult(eps, lower, upper, ordering)


def semigroup_decay(field: GridField, alpha: float, G: NonlinearitySpec, times, index=None) -> np.ndarray:
    """t * G(P_t phi(x0)) at the given times; x0 is the grid argmax unless ``index`` is given."""
    if index is None:
        index = np.unravel_index(np.argmax(field.values), field.values.shape)
    out = []
    for t in times:
        v = float(semigroup_apply(field, alpha, t).values[index])
        out.append(t * G(max(v, 0.0)))
    return np.array(out)
