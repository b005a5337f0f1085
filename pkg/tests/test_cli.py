import csv
import json

import pytest

from fujita.cli import ConfigError, execute, main, parse_config


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def load_report(path):
    return json.loads((path / "report.json").read_text())


def test_minimal_evolve_config_gets_defaults():
    cfg = parse_config(json.dumps({"d": 1, "alpha": 0.5, "beta": 2.0}), "evolve")
    assert cfg.command == "evolve"
    assert cfg.params["kind"] == "PowerLaw"
    assert cfg.params["T_max"] == 50.0
    assert cfg.seed == 0


@pytest.mark.parametrize("doc,fragment", [
    ({"d": 1, "alpha": 2.5, "beta": 1.0}, "alpha out of (0,2]"),
    ({"d": 1, "alpha": 0.5, "beta": 1.0, "betaa": 3}, "unknown key 'betaa'"),
    ({"d": 1, "alpha": 0.5}, "beta: required"),
    ({"d": 1, "alpha": 0.5, "beta": 1.0, "N": 1000}, "power of two"),
    ({"d": 1, "alpha": 0.5, "beta": 1.0, "kind": "Cubic"}, "kind"),
    ({"d": 1.5, "alpha": 0.5, "beta": 1.0}, "integer"),
])
def test_validation_errors(doc, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(doc), "evolve")
    assert any(fragment in e for e in exc.value.errors)


def test_all_errors_reported_at_once():
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps({"alpha": 3.0, "betaa": 1, "N": 7}), "evolve")
    assert len(exc.value.errors) >= 5


def test_parse_error_has_location():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"d": 1,\n "alpha": }', "evolve")
    assert "line 2" in exc.value.errors[0]


def test_command_mismatch_rejected():
    with pytest.raises(ConfigError):
        parse_config(json.dumps({"command": "regime", "d": 1, "alpha": 1.0, "beta": 1.0}), "evolve")


def test_verify_steady_end_to_end(tmp_path):
    out = tmp_path / "out"
    status = main(["verify-steady", "--config", write(tmp_path, {"d": 1, "alpha": 0.5, "A": 1.0}), "--out", str(out)])
    assert status == 0
    rep = load_report(out)
    assert rep["all_passed"]
    names = {a["name"]: a for a in rep["assertions"]}
    assert names["max_normalized_residual"]["value"] <= 1e-3
    assert rep["config"]["alpha"] == 0.5 and rep["seed"] == 0
    with open(out / "profile.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["r", "u"] and len(rows) == 52


def test_report_is_reproducible(tmp_path):
    path = write(tmp_path, {"d": 1, "alpha": 0.5, "beta": 2.0, "L": 64.0, "N": 1024, "T_max": 2.0, "scale": 0.5})
    docs = []
    for _ in range(2):
        main(["evolve", "--config", path, "--seed", "3", "--out", str(tmp_path / "o")])
        doc = load_report(tmp_path / "o")
        doc.pop("timestamp")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]
    with open(tmp_path / "o" / "trace.csv") as fh:
        assert next(csv.reader(fh)) == ["t", "sup_norm"]


def test_failed_assertion_gives_nonzero_exit(tmp_path):
    cfg = {"d": 1, "alpha": 0.5, "beta": 0.25, "expect": "GlobalRegime"}
    assert main(["regime", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    assert not load_report(tmp_path / "o")["all_passed"]


def test_bad_config_exit_code(tmp_path, capsys):
    assert main(["regime", "--config", write(tmp_path, {"d": 1, "alpha": 9.0})]) == 2
    err = capsys.readouterr().err
    assert "alpha out of (0,2]" in err and "beta: required" in err


def test_module_errors_surface_in_report(tmp_path):
    # the steady family needs d > alpha; the failure is recorded, not raised
    cfg = parse_config(json.dumps({"d": 1, "alpha": 1.5}), "verify-steady")
    assert execute(cfg, str(tmp_path / "o")) == 1
    rep = load_report(tmp_path / "o")
    assert rep["status"] == "failed" and rep["error"]["type"] == "ValidationError"


def test_evolve_then_fk_check_on_stored_trace(tmp_path):
    common = {"d": 1, "alpha": 0.5, "beta": 2.0, "L": 64.0, "N": 4096, "scale": 0.5}
    ev = dict(common, T_max=0.2, dt_max=0.01, snapshot_until=0.2, snapshot_every=0.01)
    assert main(["evolve", "--config", write(tmp_path, ev, "ev.json"), "--out", str(tmp_path / "ev")]) == 0
    fk = dict(common, t=0.2, n_paths=20000, n_steps=10, trace_file=str(tmp_path / "ev" / "snapshots.npz"))
    status = main(["fk-check", "--config", write(tmp_path, fk, "fk.json"), "--seed", "1", "--out", str(tmp_path / "fk")])
    rep = load_report(tmp_path / "fk")
    assert status == 0, rep["assertions"]
    assert {"estimate", "stderr", "grid_value", "z_score"} <= set(rep["results"])


def test_ball_symmetry_sweep_csv(tmp_path):
    cfg = {"action": "symmetry", "d": 2, "alpha": 1.0, "input": "shifted_bump", "direction": [-1.0, 0.0],
           "expect": "asymmetric", "grid_n": 81}
    assert main(["ball", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0
    with open(tmp_path / "o" / "sweep.csv") as fh:
        assert next(csv.reader(fh)) == ["lambda", "min_w"]


def test_ball_boundary(tmp_path):
    cfg = {"action": "boundary", "d": 1, "alpha": 1.5}
    assert main(["ball", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0
    rep = load_report(tmp_path / "o")
    assert abs(rep["results"]["solution"]["boundary_exponent"] - 0.75) < 0.1
