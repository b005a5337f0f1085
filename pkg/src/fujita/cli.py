"""Command-line experiment runner.

    fujita <command> --config <file.json> [--seed N] [--out DIR]

The config is a flat JSON object. Keys are validated against a per-command
schema: unknown keys are rejected, every problem is reported at once, and the
physics parameters (d, alpha, beta) have no defaults. Each run writes
``report.json`` plus CSV plot data into the output directory; the exit status
is 0 iff every built-in assertion passed (1 otherwise, 2 for a bad config).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError

COMMANDS = ("verify-steady", "evolve", "dichotomy", "fk-check", "ball", "regime")


class ConfigError(ValueError):
    """Config could not be parsed or validated; ``errors`` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


# ---------------------------------------------------------------------------
# schema


@dataclass(frozen=True)
class Key:
    kind: str  # int | float | str | bool | float_list | int_list
    default: object = None
    required: bool = False
    check: object = None  # callable(value) -> error message or None
    choices: tuple = ()


def _pos(v):
    return None if v > 0 else "must be positive"


def _nonneg(v):
    return None if v >= 0 else "must be non-negative"


def _alpha(v):
    return None if 0 < v <= 2 else "alpha out of (0,2]"


def _alpha_ball(v):
    return None if 0 < v < 2 else "alpha out of (0,2) for the ball problem"


def _dim(v):
    return None if 1 <= v <= 3 else "d must be 1, 2 or 3"


def _pow2(v):
    return None if v >= 2 and not v & (v - 1) else "N must be a power of two"


def _unit_interval_open(v):
    return None if 0 < v < 1 else "must lie in (0, 1)"


_NONLIN = {
    "kind": Key("str", "PowerLaw", choices=("PowerLaw", "ScaledPowerLaw")),
    "beta": Key("float", required=True, check=_pos),
    "c": Key("float", 1.0, check=_pos),
    "g2_theta": Key("float", 1.0, check=_pos),
}
_GRID = {
    "d": Key("int", required=True, check=_dim),
    "alpha": Key("float", required=True, check=_alpha),
    "L": Key("float", 65536.0, check=_pos),
    "N": Key("int", 1048576, check=_pow2),
}
_STEPPING = {
    "dt_max": Key("float", 0.05, check=_pos),
    "theta": Key("float", 0.05, check=_pos),
    "M_max": Key("float", 1e6, check=_pos),
    "dt_collapse": Key("float", 1e3, check=_pos),
    "delta_ext": Key("float", 1e-3, check=_pos),
    "eta": Key("float", 0.1, check=_pos),
}
_COMMON = {
    "command": Key("str", None, choices=COMMANDS),
    "seed": Key("int", 0),
    "output_dir": Key("str", "fujita_out"),
}

SCHEMAS = {
    "verify-steady": {
        **_COMMON,
        "d": Key("int", required=True, check=lambda v: None if v >= 1 else "d must be >= 1"),
        "alpha": Key("float", required=True, check=_alpha),
        "A": Key("float", 1.0, check=_pos),
        "radii": Key("float_list", [round(0.1 * k, 10) for k in range(51)]),
        "residual_tol": Key("float", 1e-3, check=_pos),
        "perturbation": Key("float", 1.1, check=_pos),
        "perturbation_min_residual": Key("float", 0.01, check=_nonneg),
        "fourier_radii": Key("float_list", [0.1 * k for k in range(1, 11)]),
        "fourier_tol": Key("float", 1e-6, check=_pos),
    },
    "evolve": {
        **_COMMON, **_GRID, **_NONLIN, **_STEPPING,
        "initial": Key("str", "steady", choices=("steady", "gaussian")),
        "A": Key("float", 1.0, check=_pos),
        "scale": Key("float", 1.0, check=_nonneg),
        "width": Key("float", 1.0, check=_pos),
        "T_max": Key("float", 50.0, check=_pos),
        "expect": Key("str", "", choices=("", "BlewUp", "Extinct", "Undecided")),
        "snapshot_until": Key("float", 0.0, check=_nonneg),
        "snapshot_every": Key("float", 0.0, check=_nonneg),
    },
    "dichotomy": {
        **_COMMON, **_GRID, **_NONLIN, **_STEPPING,
        "A": Key("float", 1.0, check=_pos),
        "eps": Key("float", 0.5, check=_unit_interval_open),
        "T_max": Key("float", 50.0, check=_pos),
        "check_ordering": Key("bool", True),
        "ordering_tol": Key("float", 1e-9, check=_nonneg),
    },
    "fk-check": {
        **_COMMON, **_GRID, **_NONLIN,
        "A": Key("float", 1.0, check=_pos),
        "scale": Key("float", 0.5, check=_pos),
        "t": Key("float", 0.5, check=_pos),
        "x": Key("float_list", None),
        "dt": Key("float", 0.002, check=_pos),
        "n_paths": Key("int", 100000, check=lambda v: None if v >= 2 else "n_paths must be >= 2"),
        "n_steps": Key("int", 50, check=_pos),
        "z_max": Key("float", 3.0, check=_pos),
        "trace_file": Key("str", ""),
    },
    "ball": {
        **_COMMON,
        "action": Key("str", required=True, choices=("solve", "symmetry", "boundary", "kernels")),
        "d": Key("int", required=True, check=lambda v: None if v in (1, 2, 3) else "d must be 1, 2 or 3"),
        "alpha": Key("float", required=True, check=_alpha_ball),
        "F_kind": Key("str", "Affine", choices=("Affine", "Saturating")),
        "F_a": Key("float", 0.1, check=_nonneg),
        "F_b": Key("float", 0.1, check=_nonneg),
        "n": Key("int", 60, check=_pos),
        "grid_n": Key("int", 161, check=lambda v: None if v >= 5 and v % 2 == 1 else "grid_n must be odd and >= 5"),
        "input": Key("str", "radial", choices=("radial", "shifted_bump", "solution")),
        "direction": Key("float_list", None),
        "expect": Key("str", "", choices=("", "symmetric", "asymmetric")),
        "points": Key("float_list", [0.0, 0.25, 0.5, 0.75, 0.9]),
        "n_paths": Key("int", 100000, check=lambda v: None if v >= 2 else "n_paths must be >= 2"),
        "dt": Key("float", 1e-3, check=_pos),
        "exponent_tol": Key("float", 0.1, check=_pos),
        "symmetry_tol": Key("float", 1e-6, check=_pos),
        "poisson_tol": Key("float", 1e-6, check=_pos),
    },
    "regime": {
        **_COMMON,
        "d": Key("int", required=True, check=lambda v: None if v >= 1 else "d must be >= 1"),
        "alpha": Key("float", required=True, check=_alpha),
        "beta": Key("float", required=True, check=_pos),
        "expect": Key("str", "", choices=("", "BlowUpForAll", "GlobalRegime")),
    },
}


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    seed: int
    output_dir: str

    def resolved(self) -> dict:
        out = dict(self.params)
        out.update(command=self.command, seed=self.seed, output_dir=self.output_dir)
        return out


def _coerce(name, spec: Key, value, errors):
    kind = spec.kind
    if kind == "bool":
        if not isinstance(value, bool):
            errors.append(f"{name}: expected true/false, got {value!r}")
            return None
        return value
    if kind == "int":
        if isinstance(value, bool) or not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
            errors.append(f"{name}: expected an integer, got {value!r}")
            return None
        value = int(value)
    elif kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            errors.append(f"{name}: expected a finite number, got {value!r}")
            return None
        value = float(value)
    elif kind == "str":
        if not isinstance(value, str):
            errors.append(f"{name}: expected a string, got {value!r}")
            return None
    elif kind == "float_list":
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in value):
            errors.append(f"{name}: expected a list of numbers, got {value!r}")
            return None
        value = [float(v) for v in value]
    if spec.choices and value not in spec.choices:
        errors.append(f"{name}: {value!r} not one of {list(spec.choices)}")
        return None
    if spec.check is not None:
        msg = spec.check(value)
        if msg:
            errors.append(f"{name}: {msg}" if not msg.startswith(name) else msg)
            return None
    return value


def parse_config(text: str, command: str | None = None) -> ExperimentConfig:
    """Parse and validate a JSON config; raises ConfigError listing all problems."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    errors = []
    cmd = command or doc.get("command")
    if command and doc.get("command") not in (None, command):
        errors.append(f"command: config says {doc.get('command')!r} but {command!r} was requested")
    if cmd not in SCHEMAS:
        raise ConfigError(errors + [f"command: {cmd!r} not one of {list(COMMANDS)}"])
    schema = SCHEMAS[cmd]
    for key in sorted(set(doc) - set(schema)):
        errors.append(f"unknown key {key!r}")
    params = {}
    for name, spec in schema.items():
        if name in doc:
            params[name] = _coerce(name, spec, doc[name], errors)
        elif spec.required:
            errors.append(f"{name}: required")
        else:
            params[name] = spec.default
    if cmd == "ball" and params.get("F_a") == 0 and params.get("F_b") == 0:
        errors.append("F_a, F_b: F must not vanish identically")
    if cmd in ("evolve", "dichotomy", "fk-check") and params.get("d") not in (None, 1) and params.get("N") and params["N"] ** params["d"] > 2**24:
        errors.append(f"N: grid N^d = {params['N']}^{params['d']} exceeds 2^24 points")
    if cmd == "fk-check" and params.get("x") is not None and params.get("d") is not None and len(params["x"]) != params["d"]:
        errors.append(f"x: expected {params['d']} coordinates")
    if errors:
        raise ConfigError(errors)
    params.pop("command", None)
    seed = params.pop("seed")
    out = params.pop("output_dir")
    return ExperimentConfig(cmd, params, seed, out)


# ---------------------------------------------------------------------------
# execution helpers


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str, bool)):
        return obj.value
    return obj


@dataclass
class Report:
    assertions: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def check(self, name, passed, value=None, threshold=None):
        self.assertions.append({"name": name, "passed": bool(passed), "value": value, "threshold": threshold})

    @property
    def ok(self):
        return all(a["passed"] for a in self.assertions)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def _nonlinearity(p):
    from .nonlinearity import NonlinearitySpec

    return NonlinearitySpec(p["kind"], p["beta"], p["c"], p["g2_theta"])


def _problem(p):
    from .evolution import ProblemSpec

    return ProblemSpec(p["d"], p["alpha"], _nonlinearity(p), p["L"], p["N"])


def _controls(p, **extra):
    from .evolution import RunControls

    keys = ("dt_max", "theta", "M_max", "dt_collapse", "delta_ext", "eta")
    return RunControls(**{k: p[k] for k in keys if k in p}, **extra)


def _steady_field(p, factor):
    from .frac_laplacian import GridField
    from .steady_states import SteadyStateParams

    sp = SteadyStateParams(p["A"], p["d"], p["alpha"])
    return GridField.radial(lambda r: factor * sp.profile(r), p["d"], p["L"], p["N"])


# ---------------------------------------------------------------------------
# commands


def _cmd_verify_steady(p, seed, out: Path, rep: Report):
    from .steady_states import SteadyStateParams, fourier_side_check, riesz_residual

    sp = SteadyStateParams(p["A"], p["d"], p["alpha"])
    res = riesz_residual(sp.profile, sp.d, sp.alpha, sp.p, p["radii"])
    rep.results["residual"] = res.to_dict()
    rep.results["a_scale"] = sp.a_scale
    rep.results["tail_constant"] = sp.tail_constant
    rep.tolerances.update(residual_tol=p["residual_tol"], fourier_tol=p["fourier_tol"])
    rep.check("max_normalized_residual", res.max_normalized <= p["residual_tol"], res.max_normalized, p["residual_tol"])
    pert = riesz_residual(lambda r: p["perturbation"] * sp.profile(r), sp.d, sp.alpha, sp.p, [0.0])
    r0 = abs(float(pert.residuals[0]))
    rep.results["perturbed_residual_at_0"] = r0
    rep.check("perturbed_input_detected", r0 >= p["perturbation_min_residual"], r0, p["perturbation_min_residual"])
    pairs = fourier_side_check(sp.A, sp.d, sp.alpha, p["fourier_radii"])
    rel = float(np.max(np.abs(pairs[:, 0] / pairs[:, 1] - 1)))
    rep.results["fourier_pairs"] = pairs.tolist()
    rep.check("fourier_side_identity", rel <= p["fourier_tol"], rel, p["fourier_tol"])
    _write_csv(out / "profile.csv", ("r", "u"), zip(res.radii, res.u_values))


def _cmd_evolve(p, seed, out: Path, rep: Report):
    from .evolution import run
    from .frac_laplacian import GridField

    spec = _problem(p)
    if p["initial"] == "steady":
        phi = _steady_field(p, p["scale"])
    else:
        a, w = p["scale"], p["width"]
        phi = GridField.radial(lambda r: a * np.exp(-(r / w) ** 2), p["d"], p["L"], p["N"])
    ctrl = _controls(p, snapshot_until=p["snapshot_until"], snapshot_every=p["snapshot_every"])
    o = run(spec, phi, p["T_max"], ctrl)
    rep.results["outcome"] = o.to_dict()
    rep.results["problem"] = spec.to_dict()
    if p["expect"]:
        rep.check("outcome_tag", o.tag.value == p["expect"], o.tag.value, p["expect"])
    _write_csv(out / "trace.csv", ("t", "sup_norm"), o.supnorm_trace)
    if o.snapshots:
        np.savez_compressed(out / "snapshots.npz", times=np.array([t for t, _ in o.snapshots]),
                            values=np.stack([f.values for _, f in o.snapshots]),
                            meta=json.dumps(spec.to_dict(), sort_keys=True))
        rep.results["snapshot_file"] = "snapshots.npz"


def _cmd_dichotomy(p, seed, out: Path, rep: Report):
    from .evolution import Tag, dichotomy_experiment

    spec = _problem(p)
    base = _steady_field(p, 1.0)
    res = dichotomy_experiment(spec, base, p["eps"], p["T_max"], _controls(p), check_ordering=p["check_ordering"])
    rep.results.update(res.to_dict())
    rep.check("lower_extinct", res.lower.tag is Tag.EXTINCT, res.lower.tag.value, "Extinct")
    rep.check("upper_blew_up", res.upper.tag is Tag.BLEW_UP, res.upper.tag.value, "BlewUp")
    for name, o in zip(("lower_vs_base", "base_vs_upper"), res.ordering):
        rep.check(f"ordering_{name}", o.max_violation <= p["ordering_tol"], o.max_violation, p["ordering_tol"])
    rep.tolerances["ordering_tol"] = p["ordering_tol"]
    _write_csv(out / "trace_lower.csv", ("t", "sup_norm"), res.lower.supnorm_trace)
    _write_csv(out / "trace_upper.csv", ("t", "sup_norm"), res.upper.supnorm_trace)


def _load_trace(path, p):
    from .feynman_kac import SolutionTrace
    from .frac_laplacian import GridField

    data = np.load(path)
    meta = json.loads(str(data["meta"]))
    spec = _problem(p)
    if (meta["d"], meta["alpha"], meta["L"], meta["N"]) != (spec.d, spec.alpha, spec.L, spec.N):
        raise ValidationError("stored trace does not match the configured problem")
    fields = [GridField(spec.d, spec.L, spec.N, v) for v in data["values"]]
    return spec, SolutionTrace(spec, data["times"], fields)


def _cmd_fk_check(p, seed, out: Path, rep: Report):
    from .evolution import run, semigroup_apply
    from .feynman_kac import SolutionTrace, fk_estimate, interpolate_field

    x = np.zeros(p["d"]) if p["x"] is None else np.asarray(p["x"], dtype=float)
    if p["trace_file"]:
        spec, trace = _load_trace(p["trace_file"], p)
    else:
        spec = _problem(p)
        phi = _steady_field(p, p["scale"])
        o = run(spec, phi, p["t"], _controls(p, dt_max=p["dt"], snapshot_until=p["t"], snapshot_every=p["dt"]))
        trace = SolutionTrace.from_outcome(spec, o)
    grid_value = float(trace.interpolate(p["t"], x[None, :])[0])
    fk = fk_estimate(trace, p["t"], x, p["n_paths"], p["n_steps"], seed, bias_check=True)
    z = fk.z_score(grid_value)
    rep.results.update(estimate=fk.estimate, stderr=fk.stderr, grid_value=grid_value, z_score=z,
                       z_score_without_bias=fk.z_score(grid_value, include_bias=False), fk=fk.to_dict())
    rep.check("fk_consistency", abs(z) <= p["z_max"], z, p["z_max"])
    control = fk_estimate(trace, p["t"], x, p["n_paths"], p["n_steps"], seed + 1, potential_scale=0.0)
    pt = float(interpolate_field(semigroup_apply(trace.fields[0], spec.alpha, p["t"]), x[None, :])[0])
    zc = (control.estimate - pt) / control.stderr
    rep.results["zero_potential_control"] = {"estimate": control.estimate, "stderr": control.stderr, "semigroup_value": pt, "z_score": zc}
    rep.check("zero_potential_control", abs(zc) <= p["z_max"], zc, p["z_max"])
    rep.tolerances["z_max"] = p["z_max"]


def _ball_input(p):
    from .ball_symmetry import BallNonlinearity, ball_grid, solve_ball_steady

    n, d = p["grid_n"], p["d"]
    ax, mesh = ball_grid(n, d)
    r = np.sqrt(sum(m * m for m in mesh))
    inside = r < 1.0
    if p["input"] == "radial":
        # expected exit time profile, radial and decreasing
        vals = np.where(inside, np.maximum(1.0 - r * r, 0.0) ** (p["alpha"] / 2), 0.0)
    elif p["input"] == "shifted_bump":
        shift = np.zeros(d)
        shift[0] = 0.3
        rr2 = sum((m - s) ** 2 for m, s in zip(mesh, shift))
        vals = np.where(inside, np.maximum(0.0, 1.0 - 4.0 * rr2), 0.0)
    else:
        if d != 1:
            raise ValidationError("input 'solution' is available for d = 1")
        sol = solve_ball_steady(BallNonlinearity(p["F_kind"], p["F_a"], p["F_b"]), p["alpha"], 1, n=p["n"])
        vals = np.array([sol.evaluate(x) for x in ax])
    return ax, vals


def _cmd_ball(p, seed, out: Path, rep: Report):
    from . import ball_symmetry as bs

    action, d, al = p["action"], p["d"], p["alpha"]
    F = bs.BallNonlinearity(p["F_kind"], p["F_a"], p["F_b"])
    if action in ("solve", "boundary"):
        if d not in (1, 2):
            raise ValidationError("the ball solver supports d = 1 and d = 2")
        sol = bs.solve_ball_steady(F, al, d, n=p["n"])
        if action == "boundary":
            if d != 1:
                raise ValidationError("boundary fit is implemented for d = 1")
            slope, eps, vals = bs.boundary_exponent(sol)
            rep.check("boundary_exponent", abs(slope - al / 2) <= p["exponent_tol"], slope, al / 2)
            rep.tolerances["exponent_tol"] = p["exponent_tol"]
            rep.results["boundary_fit"] = {"eps": eps, "u": vals}
        rep.results["solution"] = sol.to_dict()
        rep.check("symmetry_defect", sol.symmetry_defect <= p["symmetry_tol"], sol.symmetry_defect, p["symmetry_tol"])
        interior = sol.values[np.abs(sol.radial_grid) <= 0.99]
        rep.check("interior_positive", bool(np.all(interior > 0)), float(interior.min()), 0.0)
        rep.tolerances["symmetry_tol"] = p["symmetry_tol"]
        _write_csv(out / "profile.csv", ("r", "u"), zip(sol.radial_grid, sol.values))
    elif action == "symmetry":
        ax, vals = _ball_input(p)
        direction = p["direction"] or [1.0] + [0.0] * (d - 1)
        e = np.asarray(direction, dtype=float)
        e = e / np.linalg.norm(e)
        srep = bs.symmetry_diagnostic(vals, ax, e)
        rep.results["symmetry"] = srep.to_dict()
        h = ax[1] - ax[0]
        if p["expect"] == "symmetric":
            rep.check("lambda_sup_zero", abs(srep.lambda_sup) <= h, srep.lambda_sup, 0.0)
        elif p["expect"] == "asymmetric":
            rep.check("lambda_sup_negative", srep.lambda_sup < -h and len(srep.violations) > 0, srep.lambda_sup, -h)
        _write_csv(out / "sweep.csv", ("lambda", "min_w"), zip(srep.lambdas, srep.min_w))
    else:
        params = bs.BallKernelParams(al, d)
        rep.results["kernel_params"] = params.to_dict()
        masses = []
        for s in p["points"]:
            x = np.zeros(d)
            x[0] = s
            masses.append(bs.poisson_mass(params, x))
        err = float(np.max(np.abs(np.array(masses) - 1)))
        rep.results["poisson_masses"] = masses
        rep.check("poisson_normalization", err <= p["poisson_tol"], err, p["poisson_tol"])
        rep.tolerances["poisson_tol"] = p["poisson_tol"]
        rng = np.random.default_rng(seed)
        xs = rng.uniform(-0.6, 0.6, (20, d))
        ys = rng.uniform(-0.6, 0.6, (20, d))
        g1 = bs.green_function(params, xs, ys)
        g2 = bs.green_function(params, ys, xs)
        sym = float(np.max(np.abs(g1 - g2) / np.abs(g1)))
        rep.check("green_symmetry", sym <= 1e-10, sym, 1e-10)
        exit_rows = []
        for s in (0.0, 0.5):
            x = np.zeros(d)
            x[0] = s
            gm = bs.green_mass(params, x)
            mc = bs.simulate_exit(al, d, x, p["n_paths"], p["dt"], seed).mean_exit_time()
            z = (mc[0] - gm) / mc[1]
            exit_rows.append({"x": s, "green_mass": gm, "mc_mean": mc[0], "mc_stderr": mc[1], "z_score": z})
            rep.check(f"green_exit_time_x={s}", abs(z) <= 3.0, z, 3.0)
        rep.results["exit_time"] = exit_rows


def _cmd_regime(p, seed, out: Path, rep: Report):
    from .nonlinearity import NonlinearitySpec, regime

    r = regime(p["d"], p["alpha"], NonlinearitySpec("PowerLaw", p["beta"]))
    rep.results["regime"] = r.value
    rep.results["alpha_over_beta"] = p["alpha"] / p["beta"]
    if p["expect"]:
        rep.check("regime", r.value == p["expect"], r.value, p["expect"])


_DISPATCH = {
    "verify-steady": _cmd_verify_steady,
    "evolve": _cmd_evolve,
    "dichotomy": _cmd_dichotomy,
    "fk-check": _cmd_fk_check,
    "ball": _cmd_ball,
    "regime": _cmd_regime,
}


def execute(config: ExperimentConfig, out_dir: str | None = None) -> int:
    """Run the experiment, write report.json and CSVs; return the exit status."""
    out = Path(out_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = Report()
    status = "complete"
    error = None
    try:
        _DISPATCH[config.command](config.params, config.seed, out, rep)
    except (ValueError, RuntimeError) as exc:
        status = "failed"
        error = {"type": type(exc).__name__, "message": str(exc), "details": getattr(exc, "errors", None) or getattr(exc, "diagnostics", None)}
        rep.check("completed_without_error", False, str(exc))
    doc = {
        "version": __version__,
        "command": config.command,
        "config": config.resolved(),
        "seed": config.seed,
        "status": status,
        "error": error,
        "tolerances": rep.tolerances,
        "assertions": rep.assertions,
        "all_passed": rep.ok,
        "results": rep.results,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    with open(out / "report.json", "w") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return 0 if rep.ok else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="fujita", description="Fractional Fujita equation laboratory.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    ap.add_argument("--out", default=None, help="override the output directory")
    args = ap.parse_args(argv)
    try:
        text = Path(args.config).read_text()
        cfg = parse_config(text, args.command)
    except OSError as exc:
        print(f"fujita: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for e in exc.errors:
            print(f"fujita: config error: {e}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.output_dir = args.out
    status = execute(cfg)
    print(f"{cfg.command}: {'PASS' if status == 0 else 'FAIL'} -> {Path(cfg.output_dir) / 'report.json'}")
    return status


if __name__ == "__main__":
    sys.exit(main())
