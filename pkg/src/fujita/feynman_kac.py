"""Monte Carlo Feynman-Kac estimates of a computed solution.

For a solution u of u_t = Delta_alpha u + G(u) with u(0) = phi > 0,

    u(t, x) = E_x[ phi(X_t) exp( int_0^t V(t - s, X_s) ds ) ],   V = G(u)/u,

where X is the symmetric alpha-stable process started at x. This is the
forward form: paths start at the query point and read the potential
backwards in time, so no bridge sampling is needed. The potential comes
from stored solver snapshots, interpolated multilinearly in space (with
periodic wrapping, as on the solver's torus) and linearly in time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, ValidationError
from .evolution import ProblemSpec, SimOutcome
from .frac_laplacian import GridField
from .stable_process import make_rng, sample_increments


@dataclass
class SolutionTrace:
    spec: ProblemSpec
    times: np.ndarray
    fields: list

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.fields) != self.times.size or self.times.size < 1:
            raise ValidationError("times and fields must have the same non-zero length")
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise ValidationError("trace times must start at 0 and increase strictly")
        for f in self.fields:
            if (f.d, f.L, f.N) != (self.spec.d, self.spec.L, self.spec.N):
                raise ValidationError("snapshot grid does not match the problem grid")

    @classmethod
    def from_outcome(cls, spec: ProblemSpec, outcome: SimOutcome) -> "SolutionTrace":
        if not outcome.snapshots:
            raise ValidationError("run was made without snapshots")
        times = [t for t, _ in outcome.snapshots]
        return cls(spec, np.array(times), [f for _, f in outcome.snapshots])

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def interpolate(self, s: float, points: np.ndarray) -> np.ndarray:
        """u(s, points), points of shape (n, d)."""
        if s < -1e-12 or s > self.t_max * (1 + 1e-12):
            raise RangeError(f"time {s} outside trace range [0, {self.t_max}]")
        i = int(np.clip(np.searchsorted(self.times, s, side="right") - 1, 0, self.times.size - 1))
        here = interpolate_field(self.fields[i], points)
        if i == self.times.size - 1 or s == self.times[i]:
            return here
        w = (s - self.times[i]) / (self.times[i + 1] - self.times[i])
        return (1 - w) * here + w * interpolate_field(self.fields[i + 1], points)


def interpolate_field(field: GridField, points: np.ndarray) -> np.ndarray:
    """Periodic multilinear interpolation of grid values at points of shape (n, d)."""
    pts = np.asarray(points, dtype=float).reshape(-1, field.d)
    s = (pts + 0.5 * field.L) / field.h
    base = np.floor(s)
    frac = s - base
    base = base.astype(np.int64)
    out = np.zeros(len(pts))
    for corner in itertools.product((0, 1), repeat=field.d):
        w = np.ones(len(pts))
        idx = []
        for ax, c in enumerate(corner):
            w *= frac[:, ax] if c else 1.0 - frac[:, ax]
            idx.append((base[:, ax] + c) % field.N)
        out += w * field.values[tuple(idx)]
    return out


@dataclass
class FKResult:
    estimate: float
    stderr: float
    n_paths: int
    n_steps: int
    refined_estimate: float | None = None
    bias_estimate: float | None = None
    bias_stderr: float | None = None

    def z_score(self, reference: float, include_bias: bool = True) -> float:
        """(estimate - reference) / sqrt(stderr^2 + bias^2)."""
        var = self.stderr**2
        if include_bias and self.bias_estimate is not None:
            var += self.bias_estimate**2
        return (self.estimate - reference) / math.sqrt(var) if var > 0 else math.copysign(math.inf, self.estimate - reference) if self.estimate != reference else 0.0

    def to_dict(self):
        return {k: getattr(self, k) for k in ("estimate", "stderr", "n_paths", "n_steps", "refined_estimate", "bias_estimate", "bias_stderr")}


def _weights(trace, t, x, n, n_steps, rng, potential_scale, bias_check):
    d, alpha = trace.spec.d, trace.spec.alpha
    G = trace.spec.nonlinearity
    sub = 4 * n_steps if bias_check else 2 * n_steps
    h = t / sub
    pos = np.tile(np.asarray(x, dtype=float), (n, 1))
    acc_coarse = np.zeros(n)  # n_steps midpoint rule
    acc_fine = np.zeros(n)  # 2 n_steps midpoint rule (bias check only)
    for j in range(1, sub + 1):
        pos = pos + sample_increments(alpha, h, d, rng, n)
        if potential_scale == 0.0 or j == sub:
            continue
        s = j * h
        coarse_mid = (j % 4 == 2) if bias_check else (j % 2 == 1)
        fine_mid = bias_check and (j % 2 == 1)
        if not (coarse_mid or fine_mid):
            continue
        u = trace.interpolate(t - s, pos)
        if np.any(u <= 0):
            raise ValidationError(f"solution is not positive along a path (time {t - s:.4g})")
        v = G.ratio(u)
        if coarse_mid:
            acc_coarse += v * (t / n_steps)
        if fine_mid:
            acc_fine += v * (t / (2 * n_steps))
    phi = interpolate_field(trace.fields[0], pos)
    w = phi * np.exp(potential_scale * acc_coarse)
    wf = phi * np.exp(potential_scale * acc_fine) if bias_check else None
    return w, wf


def fk_estimate(trace: SolutionTrace, t: float, x, n_paths: int, n_steps: int, seed: int,
                potential_scale: float = 1.0, bias_check: bool = False, chunk: int = 20000) -> FKResult:
    """Monte Carlo estimate of u(t, x) with its standard error.

    The potential integral uses the midpoint rule on ``n_steps`` uniform
    steps. ``potential_scale`` multiplies V (0 gives E_x phi(X_t)). With
    ``bias_check`` the same paths are also scored with 2 n_steps steps and the
    difference is reported as the time-discretisation bias. Paths are drawn in
    chunks; chunk k uses the RNG stream (seed, k).
    """
    if not 0 < t <= trace.t_max * (1 + 1e-12):
        raise RangeError(f"t={t} outside (0, {trace.t_max}]")
    if n_paths < 2 or n_steps < 1:
        raise ValidationError("need n_paths >= 2 and n_steps >= 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (trace.spec.d,):
        raise ValidationError(f"x must have {trace.spec.d} coordinates")
    ws, wfs = [], []
    for k, start in enumerate(range(0, n_paths, chunk)):
        n = min(chunk, n_paths - start)
        w, wf = _weights(trace, t, x, n, n_steps, make_rng(seed, k), potential_scale, bias_check)
        ws.append(w)
        if wf is not None:
            wfs.append(wf)
    w = np.concatenate(ws)
    res = FKResult(float(w.mean()), float(w.std(ddof=1) / math.sqrt(n_paths)), n_paths, n_steps)
    if bias_check:
        wf = np.concatenate(wfs)
        diff = wf - w
        res.refined_estimate = float(wf.mean())
        res.bias_estimate = float(diff.mean())
        res.bias_stderr = float(diff.std(ddof=1) / math.sqrt(n_paths))
    return res
