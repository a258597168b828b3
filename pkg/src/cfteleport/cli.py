"""Command-line front end.

    teleport <subcommand> --config scenario.json [--out FILE] [--seed N] [--samples N]

Subcommands: ``standard-form``, ``teleport``, ``optimize``, ``montecarlo``,
``sweep``.  JSON reports follow ``schemas/output.schema.json``; ``sweep``
writes CSV.  Exit codes: 0 success, 1 runtime or numeric failure, 2 invalid
configuration.  Set ``CFTELEPORT_WORKERS`` to cap Monte-Carlo threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from importlib import resources
from typing import Any, Dict

import jsonschema
import numpy as np

from . import __version__
from .cf_engine import (
    Cat,
    Coherent,
    Fock,
    SqueezedThermal,
    build_cf,
    fidelity_overlap,
    mean_photon,
    save_grid,
    save_wigner_csv,
    teleport_cf,
    wigner_transform,
)
from .channel import (
    BALANCED,
    MeasurementGeometry,
    gaussian_output,
    gaussian_overlap,
    induced_covariance,
)
from .exceptions import (
    GeometryError,
    GridError,
    MalformedInputError,
    NotBonaFideError,
    TeleportError,
)
from .gaussian_core import (
    StandardFormI,
    TwoModeCovariance,
    classicality_check,
    ptranspose_symplectic_eigenvalues,
    require_bona_fide,
    symplectic_eigenvalues,
    to_standard_form_I,
)
from .montecarlo import added_noise_estimate, dump_samples_csv, run_ensemble, sample_outcomes
from .optimizer import OptimizerConfig, optimize_general, optimize_symmetric, separability

SIG_DIGITS = 12
SWEEP_COLUMNS = ["param", "n_added", "n_min", "delta_epr", "fidelity"]
SWEEP_KEYS = ("r", "theta", "b", "b1", "b2", "c", "d")
MC_SELFTEST_SIGMAS = 5.0
MC_MIN_SAMPLES = 10_000


class ConfigError(TeleportError, ValueError):
    pass


def _schema(name: str) -> Dict[str, Any]:
    text = resources.files("cfteleport").joinpath("schemas", name).read_text()
    return json.loads(text)


def _round(x):
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.ndarray):
        return _round(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{SIG_DIGITS}g}")
    return x


def _fmt(x) -> str:
    return "" if x is None else f"{float(x):.{SIG_DIGITS}g}"


# --- scenario loading ------------------------------------------------------------


def load_config(path) -> Dict[str, Any]:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, _schema("config.schema.json"))
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    return cfg


def resource_from_config(spec: Dict[str, Any]) -> TwoModeCovariance:
    kind = spec["type"]
    if kind == "vacuum":
        v = TwoModeCovariance.vacuum()
    elif kind == "tmsv":
        v = TwoModeCovariance.tmsv(spec["r"])
    elif kind == "symmetric":
        v = StandardFormI(spec["b"], spec["b"], spec["c"], spec["d"]).covariance()
    elif kind == "standard_form":
        v = StandardFormI(spec["b1"], spec["b2"], spec["c"], spec["d"]).covariance()
    else:
        v = TwoModeCovariance(np.array(spec["matrix"], dtype=float))
    return require_bona_fide(v)


def _complex(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def input_from_config(spec: Dict[str, Any]):
    kind = spec["type"]
    if kind == "coherent":
        return Coherent(_complex(spec.get("alpha", 0.0)))
    if kind == "fock":
        return Fock(spec["n"])
    if kind == "cat":
        return Cat(_complex(spec["alpha"]), spec.get("phase", 0.0))
    return SqueezedThermal(spec.get("nbar", 0.0), spec.get("s", 0.0))


def _geometry(cfg) -> MeasurementGeometry:
    return MeasurementGeometry(cfg.get("theta", BALANCED))


def _grid_args(cfg):
    g = cfg.get("grid", {})
    return g.get("extent", 6.0), g.get("n", 257)


def _optimizer_config(cfg) -> OptimizerConfig:
    o = cfg.get("optimizer", {})
    return OptimizerConfig(
        u_max=o.get("u_max", 1e3), grid_points=o.get("grid_points", 400), seed=o.get("seed", 0)
    )


def _sf_dict(s: StandardFormI):
    return asdict(s)


def _opt_dict(res):
    return {
        "v": [res.v.u1, res.v.u2],
        "n_min": res.n_min,
        "residuals": list(res.residuals),
        "method": res.method,
        "grid_gap": res.grid_gap,
        "grid_min": res.grid_min,
        "stationary_points": [list(p) for p in res.stationary_points],
    }


# --- subcommands ---------------------------------------------------------------------


def cmd_standard_form(cfg, args) -> Dict[str, Any]:
    v = resource_from_config(cfg["resource"])
    s, (t1, t2) = to_standard_form_I(v)
    sep = separability(s)
    return {
        "command": "standard-form",
        "standard_form": _sf_dict(s),
        "symplectic_eigenvalues": list(symplectic_eigenvalues(v)),
        "ptranspose_symplectic_eigenvalues": list(ptranspose_symplectic_eigenvalues(v)),
        "c_tilde_minus": sep.c_tilde_minus,
        "separability": asdict(sep),
        "local_symplectics": [t1, t2],
    }


def _teleport_row(v, g, preset, grid_args):
    """(induced field, v_out or None, output photons, fidelity or None, (grid_in, grid_out) or None)."""
    induced = induced_covariance(v, g, path="checked")
    if preset.is_gaussian:
        rep = gaussian_output(preset.covariance(), v, g)
        mean = preset.mean()
        nbar = rep.v_out.mean_photon() + 0.5 * float(mean @ mean)
        fid = gaussian_overlap(preset.covariance(), rep.v_out, mean, mean) if preset.is_pure else None
        return induced, rep.v_out, nbar, fid, None
    grid_in = build_cf(preset, *grid_args)
    grid_out = teleport_cf(grid_in, v, g)
    fid = fidelity_overlap(grid_in, grid_out) if preset.is_pure else None
    return induced, None, mean_photon(grid_out).value, fid, (grid_in, grid_out)


def cmd_teleport(cfg, args) -> Dict[str, Any]:
    v = resource_from_config(cfg["resource"])
    g = _geometry(cfg)
    preset = input_from_config(cfg.get("input", {"type": "coherent"}))
    grid_args = _grid_args(cfg)
    induced, v_out, nbar_out, fid, grids = _teleport_row(v, g, preset, grid_args)
    output: Dict[str, Any] = {"mean_photon": nbar_out, "fidelity": fid}
    if v_out is not None:
        output["v_out"] = v_out.matrix
        output["mean"] = preset.mean()
    else:
        w = wigner_transform(grids[1])
        output["wigner_min"] = float(w.values.min())
        output["mean_photon_cf_input"] = mean_photon(grids[0]).value
        export = cfg.get("export", {})
        if "cf_grid" in export:
            save_grid(grids[1], export["cf_grid"])
        if "wigner_csv" in export:
            save_wigner_csv(w, export["wigner_csv"])
    resource, _ = to_standard_form_I(v)
    return {
        "command": "teleport",
        "theta": g.theta,
        "resource": _sf_dict(resource),
        "induced": {
            "vm": induced.vm.matrix,
            "n_added": induced.n_added,
            "classical": classicality_check(induced.vm),
        },
        "input": {
            "label": preset.label,
            "gaussian": preset.is_gaussian,
            "pure": preset.is_pure,
            "mean_photon": preset.mean_photon(),
        },
        "output": output,
    }


def cmd_optimize(cfg, args) -> Dict[str, Any]:
    v = resource_from_config(cfg["resource"])
    s, _ = to_standard_form_I(v)
    closed = _opt_dict(optimize_symmetric(s)) if s.symmetric else None
    numeric = optimize_general(s, _optimizer_config(cfg))
    return {
        "command": "optimize",
        "standard_form": _sf_dict(s),
        "closed_form": closed,
        "numeric": _opt_dict(numeric),
        "separability": asdict(separability(s)),
    }


def cmd_montecarlo(cfg, args) -> Dict[str, Any]:
    v = resource_from_config(cfg["resource"])
    g = _geometry(cfg)
    preset = input_from_config(cfg.get("input", {"type": "coherent"}))
    if not preset.is_gaussian:
        raise ConfigError("montecarlo needs a Gaussian input (coherent or squeezed_thermal)")
    mc = cfg.get("montecarlo", {})
    samples = args.samples if args.samples is not None else mc.get("samples", 100_000)
    seed = args.seed if args.seed is not None else mc.get("seed", 0)
    warnings = []
    if samples < MC_MIN_SAMPLES:
        warnings.append(f"only {samples} samples; standard errors are unreliable below {MC_MIN_SAMPLES}")
        print(f"warning: {warnings[-1]}", file=sys.stderr)

    v_in, mean_in = preset.covariance(), preset.mean()
    analytic = gaussian_output(v_in, v, g)
    stats = run_ensemble(v_in, v, g, samples, seed, mean_in=mean_in)
    if "dump_samples" in mc:
        dump_samples_csv(mc["dump_samples"], sample_outcomes(v_in, v, g, samples, seed, mean_in), g.theta)

    z = (stats.cov - analytic.v_out.matrix) / stats.cov_stderr
    z_mean = (stats.mean - mean_in) / stats.mean_stderr
    n_added_emp, n_added_se = added_noise_estimate(stats, v_in)
    ok = bool(np.abs(z).max() <= MC_SELFTEST_SIGMAS and np.abs(z_mean).max() <= MC_SELFTEST_SIGMAS)
    return {
        "command": "montecarlo",
        "theta": g.theta,
        "samples": stats.n_samples,
        "seed": seed,
        "analytic": analytic.v_out.matrix,
        "empirical": stats.cov,
        "stderr": stats.cov_stderr,
        "z": z,
        "mean": {"input": mean_in, "empirical": stats.mean, "stderr": stats.mean_stderr, "z": z_mean},
        "n_added": {
            "analytic": analytic.induced.n_added,
            "empirical": n_added_emp,
            "stderr": n_added_se,
        },
        "pass": ok,
        "warnings": warnings,
    }


def _sweep_values(spec):
    start, stop, step = spec["start"], spec["stop"], spec["step"]
    if step <= 0 or stop < start:
        raise ConfigError(f"empty sweep range [{start}, {stop}] with step {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _swept_scenario(cfg, key, value):
    res = dict(cfg["resource"])
    theta = cfg.get("theta", BALANCED)
    if key == "theta":
        theta = value
    elif key == "r":
        res = {"type": "tmsv", "r": value}
    elif res["type"] == "symmetric" and key in ("b", "c", "d"):
        res[key] = value
    elif res["type"] == "standard_form" and key in ("b1", "b2", "c", "d"):
        res[key] = value
    else:
        raise ConfigError(f"sweep key {key!r} does not apply to resource type {res['type']!r}")
    return resource_from_config(res), MeasurementGeometry(theta)


def cmd_sweep(cfg, args) -> str:
    if "sweep" not in cfg:
        raise ConfigError("sweep subcommand needs a 'sweep' section")
    spec = cfg["sweep"]
    key = spec["key"]
    if key not in SWEEP_KEYS:
        raise ConfigError(f"unknown sweep key {key!r}; expected one of {SWEEP_KEYS}")
    preset = input_from_config(cfg.get("input", {"type": "coherent"}))
    grid_args = _grid_args(cfg)
    opt_cfg = _optimizer_config(cfg)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for value in _sweep_values(spec):
        v, g = _swept_scenario(cfg, key, float(value))
        induced, _, _, fid, _ = _teleport_row(v, g, preset, grid_args)
        s, _ = to_standard_form_I(v)
        sep = separability(s)
        n_min = optimize_symmetric(s).n_min if s.symmetric else optimize_general(s, opt_cfg).n_min
        writer.writerow([_fmt(value), _fmt(induced.n_added), _fmt(n_min), _fmt(sep.delta_epr), _fmt(fid)])
    return buf.getvalue()


COMMANDS = {
    "standard-form": cmd_standard_form,
    "teleport": cmd_teleport,
    "optimize": cmd_optimize,
    "montecarlo": cmd_montecarlo,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="teleport", description="CV teleportation in the CF picture")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, help="override montecarlo.seed")
        p.add_argument("--samples", type=int, help="override montecarlo.samples")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        result = COMMANDS[args.command](cfg, args)
    except (ConfigError, NotBonaFideError, GeometryError, MalformedInputError, GridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TeleportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if isinstance(result, str):
        text = result
    else:
        result = {"command": result.pop("command"), "version": __version__, **result}
        text = json.dumps(_round(result), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "montecarlo" and not result["pass"]:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
