import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from cfteleport.cli import main

OUTPUT_SCHEMA = json.loads(resources.files("cfteleport").joinpath("schemas/output.schema.json").read_text())


@pytest.fixture
def run(tmp_path, capsys):
    def _run(cfg, *extra):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        code = main([extra[0], "--config", str(path), *extra[1:]])
        out = capsys.readouterr()
        return code, out.out, out.err

    return _run


def report(run, command, cfg, *extra):
    code, out, err = run(cfg, command, *extra)
    assert code == 0, err
    data = json.loads(out)
    jsonschema.validate(data, OUTPUT_SCHEMA)
    return data


def test_standard_form(run):
    data = report(run, "standard-form", {"resource": {"type": "tmsv", "r": 0.5}})
    assert data["standard_form"]["c"] == pytest.approx(np.sinh(1) / 2)
    assert data["separability"]["entangled"]
    assert data["c_tilde_minus"] == pytest.approx(np.exp(-1) / 2, rel=1e-10)


def test_teleport_coherent(run):
    data = report(run, "teleport", {"resource": {"type": "tmsv", "r": 1.0}, "input": {"type": "coherent", "alpha": [1, 0.5]}})
    assert data["induced"]["n_added"] == pytest.approx(np.exp(-2), abs=1e-11)
    assert data["output"]["fidelity"] == pytest.approx(1 / (1 + np.exp(-2)), abs=1e-11)
    assert data["input"]["mean_photon"] == pytest.approx(1.25)


def test_teleport_fock(run, tmp_path):
    cfg = {
        "resource": {"type": "tmsv", "r": 1.0},
        "input": {"type": "fock", "n": 1},
        "export": {"cf_grid": str(tmp_path / "g.txt"), "wigner_csv": str(tmp_path / "w.csv")},
    }
    data = report(run, "teleport", cfg)
    assert data["output"]["mean_photon"] == pytest.approx(1 + np.exp(-2), abs=2e-3)
    assert data["output"]["wigner_min"] < 0
    assert (tmp_path / "g.txt").exists() and (tmp_path / "w.csv").exists()


def test_optimize(run):
    data = report(run, "optimize", {"resource": {"type": "symmetric", "b": 1.0, "c": 0.6, "d": -0.2}})
    assert data["closed_form"]["n_min"] == pytest.approx(2 * np.sqrt(0.32))
    assert data["numeric"]["n_min"] == pytest.approx(data["closed_form"]["n_min"], abs=1e-10)
    data = report(run, "optimize", {"resource": {"type": "standard_form", "b1": 2.0, "b2": 1.0, "c": 0.8, "d": -0.5}})
    assert data["closed_form"] is None
    assert abs(data["numeric"]["grid_gap"]) < 1e-6


def test_montecarlo_reproducible(run, tmp_path):
    cfg = {"resource": {"type": "tmsv", "r": 0.5}, "montecarlo": {"samples": 20000, "seed": 7}}
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    code_a, _, _ = run(cfg, "montecarlo", "--out", str(a))
    code_b, _, _ = run(cfg, "montecarlo", "--out", str(b))
    assert code_a == code_b == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    jsonschema.validate(data, OUTPUT_SCHEMA)
    assert data["pass"] and data["seed"] == 7
    c = tmp_path / "c.json"
    run(cfg, "montecarlo", "--out", str(c), "--seed", "8")
    assert c.read_bytes() != a.read_bytes()


def test_montecarlo_warns_on_few_samples(run):
    code, out, err = run({"resource": {"type": "vacuum"}}, "montecarlo", "--samples", "500")
    assert "warning" in err
    assert json.loads(out)["warnings"]


def test_montecarlo_rejects_nongaussian(run):
    code, _, err = run({"resource": {"type": "vacuum"}, "input": {"type": "fock", "n": 1}}, "montecarlo")
    assert code == 2 and "Gaussian" in err


def test_sweep_r(run):
    cfg = {"resource": {"type": "tmsv", "r": 0}, "sweep": {"key": "r", "start": 0, "stop": 2, "step": 0.1}}
    code, out, _ = run(cfg, "sweep")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 21
    for row in rows:
        r = float(row["param"])
        assert float(row["n_added"]) == pytest.approx(np.exp(-2 * r), abs=1e-10)
        assert float(row["n_min"]) == pytest.approx(np.exp(-2 * r), abs=1e-10)
        assert float(row["fidelity"]) == pytest.approx(1 / (1 + np.exp(-2 * r)), abs=1e-10)


def test_sweep_theta(run):
    from cfteleport.channel import added_noise, unbalanced_to_balanced
    from cfteleport.gaussian_core import StandardFormI

    res = {"type": "symmetric", "b": 1.2, "c": 0.7, "d": -0.5}
    cfg = {"resource": res, "sweep": {"key": "theta", "start": 0.3, "stop": 1.2, "step": 0.3}}
    code, out, _ = run(cfg, "sweep")
    rows = list(csv.DictReader(io.StringIO(out)))
    v = StandardFormI(1.2, 1.2, 0.7, -0.5).covariance()
    assert len(rows) == 4
    for row in rows:
        theta = float(row["param"])
        assert float(row["n_added"]) == pytest.approx(added_noise(unbalanced_to_balanced(v, theta)), rel=1e-10)


@pytest.mark.parametrize(
    "cfg,command",
    [
        ({"resource": {"type": "tmsv", "r": 0}, "sweep": {"key": "r", "start": 1, "stop": 0, "step": 0.1}}, "sweep"),
        ({"resource": {"type": "tmsv", "r": 0}, "sweep": {"key": "zeta", "start": 0, "stop": 1, "step": 0.1}}, "sweep"),
        ({"resource": {"type": "tmsv", "r": 0}}, "sweep"),
        ({"resource": {"type": "covariance", "matrix": (0.2 * np.eye(4)).tolist()}}, "standard-form"),
        ({"resource": {"type": "vacuum"}, "theta": 0.0}, "teleport"),
        ({"resource": {"type": "vacuum"}, "grid": {"n": 64}, "input": {"type": "fock", "n": 1}}, "teleport"),
        ({"resource": {"type": "unknown"}}, "teleport"),
        ({"resource": {"type": "vacuum"}, "extra": 1}, "teleport"),
    ],
)
def test_exit_code_2(run, cfg, command):
    code, out, err = run(cfg, command)
    assert code == 2
    assert err.startswith("error:")
    assert out == ""


def test_missing_config_file(tmp_path, capsys):
    assert main(["teleport", "--config", str(tmp_path / "nope.json")]) == 2


def test_console_script(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"resource": {"type": "vacuum"}}))
    proc = subprocess.run(
        [sys.executable, "-m", "cfteleport", "teleport", "--config", str(path)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["induced"]["n_added"] == pytest.approx(1.0)
