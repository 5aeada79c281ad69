"""Command-line entry point.

Three subcommands:

* ``theory``    -- tabulate a limit kernel on a shift grid to CSV;
* ``simulate``  -- Monte Carlo covariance curve, variance growth and
                   coarse-grained paths for a process, to CSV files plus a
                   JSON sidecar recording the config hash;
* ``compare``   -- check a simulated covariance curve against a limit
                   kernel and emit a JSON verdict.

Configuration comes from ``--config file.json`` and/or flags mirroring the
JSON keys; merged configs are schema-validated (unknown keys rejected).
Exit codes: 2 config errors, 3 domain errors, 4 sampler/estimator errors,
5 comparison errors.  CSV numbers use shortest round-trip formatting, so
identical configs give byte-identical files regardless of thread count.
"""

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np
import jsonschema

from . import __version__
from .beta_models import ModelError, make_model
from .estimators import (EstimatorError, coarse_grained_path, estimate_cov_curve,
                         estimate_variance_growth, resolve_threads)
from .gaussian_limit import KernelError, integrable_kernel, rv1d_kernel, rv2d_kernel
from .samplers import SamplerError, make_process
from .theory import (TheoryError, cov_finite_1d, cov_finite_2d, fit_rv2d_params,
                     var_finite_1d, var_finite_2d)

EXIT_CONFIG, EXIT_DOMAIN, EXIT_SAMPLER, EXIT_COMPARE = 2, 3, 4, 5


class ConfigError(ValueError):
    pass


class CompareError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

_ZGRID_SCHEMA = {
    "type": "object",
    "properties": {
        "min": {"type": "number"},
        "max": {"type": "number"},
        "step": {"type": "number", "exclusiveMinimum": 0},
        "lattice": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

_MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["pyramidal", "mixture", "sine2", "perturbation_tail",
                          "zero", "poisson"]},
        "d": {"type": "integer", "minimum": 1, "maximum": 2},
        "m": {"type": "integer", "minimum": 1},
        "a": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "weights": {"type": "object"},
        "m_explicit": {"type": "integer", "minimum": 1},
        "infinite_tail": {"type": "boolean"},
        "s": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "scale": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_PROCESS_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["poisson", "perturbed_uniform", "perturbed_mixture",
                          "perturbed_heavy"]},
        "d": {"type": "integer", "minimum": 1, "maximum": 2},
        "m": {"type": "integer", "minimum": 1},
        "a": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "m_max": {"type": "integer", "minimum": 1},
        "s": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "z_max": {"type": "number", "exclusiveMinimum": 0},
        "r0_factor": {"type": "number", "exclusiveMinimum": 0},
        "band_residual": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_SCHEMAS = {
    "theory": {
        "type": "object",
        "properties": {
            "family": {"enum": ["integrable", "rv1d", "rv2d"]},
            "d": {"type": "integer", "minimum": 1, "maximum": 3},
            "a": {"type": "array", "items": {"type": "number", "minimum": 0,
                                             "maximum": 1}, "minItems": 1},
            "model": _MODEL_SCHEMA,
            "zgrid": _ZGRID_SCHEMA,
            "out": {"type": "string"},
        },
        "required": ["family", "zgrid", "out"],
        "additionalProperties": False,
    },
    "simulate": {
        "type": "object",
        "properties": {
            "process": _PROCESS_SCHEMA,
            "n": {"type": "number", "exclusiveMinimum": 0},
            "zgrid": _ZGRID_SCHEMA,
            "replicas": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer"},
            "out_dir": {"type": "string"},
            "threads": {"type": "integer", "minimum": 1},
            "n_grid": {"type": "array", "items": {"type": "number",
                                                  "exclusiveMinimum": 0},
                       "minItems": 1},
            "var_replicas": {"type": "integer", "minimum": 1},
            "path_replicas": {"type": "integer", "minimum": 0},
        },
        "required": ["process", "n", "zgrid", "replicas", "seed", "out_dir"],
        "additionalProperties": False,
    },
    "compare": {
        "type": "object",
        "properties": {
            "curve": {"type": "string"},
            "family": {"enum": ["integrable", "rv1d", "rv2d"]},
            "a": {"type": "number", "minimum": 0, "maximum": 1},
            "model": _MODEL_SCHEMA,
            "zgrid": _ZGRID_SCHEMA,
            "tolerance_sigmas": {"type": "number", "exclusiveMinimum": 0},
            "epsilon": {"type": "number", "exclusiveMinimum": 0},
            "out": {"type": "string"},
            "force": {"type": "boolean"},
            "expect_hash": {"type": "string"},
        },
        "required": ["curve", "family"],
        "additionalProperties": False,
    },
}


def _config_hash(config):
    clean = {k: v for k, v in config.items() if k != "threads"}
    blob = json.dumps(clean, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _parse_zgrid_flag(text):
    if text.startswith("lattice:"):
        return {"lattice": int(text.split(":", 1)[1])}
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"zgrid flag must be min:max:step or lattice:M, got {text!r}")
    return {"min": float(parts[0]), "max": float(parts[1]), "step": float(parts[2])}


def _grid_points(zgrid, d):
    if "lattice" in zgrid:
        m = zgrid["lattice"]
        axis = np.arange(-m, m + 1, dtype=float)
        if d == 1:
            return axis
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        return np.column_stack([x.ravel() for x in mesh])
    for key in ("min", "max", "step"):
        if key not in zgrid:
            raise ConfigError("zgrid needs min, max and step (or lattice)")
    lo, hi, step = zgrid["min"], zgrid["max"], zgrid["step"]
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    pts = np.array([round(lo + k * step, 10) for k in range(count)])
    if d == 1:
        return pts
    if d == 2:
        mesh = np.meshgrid(pts, pts, indexing="ij")
        return np.column_stack([x.ravel() for x in mesh])
    raise ConfigError(f"dense grids support d <= 2, got d = {d}")


def _merge_config(args, keys):
    config = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        config.update(loaded)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            config[key] = val
    return config


def _validate(command, config):
    try:
        jsonschema.validate(config, _SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid {command} config: {exc.message}") from None
    return config


# ---------------------------------------------------------------------------
# CSV emission (shortest round-trip decimals, LF, atomic)
# ---------------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return repr(float(value))


def _write_csv(path, header, rows):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    os.replace(tmp, path)


def _write_sidecar(path, command, config, seed):
    meta = {
        "command": command,
        "config": {k: v for k, v in config.items() if k != "threads"},
        "config_hash": _config_hash(config),
        "seed": seed,
        "version": __version__,
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# kernels from config
# ---------------------------------------------------------------------------

def _kernel_from_config(config, d):
    family = config["family"]
    if family == "integrable":
        return integrable_kernel(d=d)
    if family == "rv1d":
        a = config.get("a")
        if isinstance(a, list):
            a = a[0]
        if a is None:
            raise ConfigError("rv1d kernel needs 'a'")
        return rv1d_kernel(float(a))
    model_spec = config.get("model")
    if model_spec is None:
        raise ConfigError("rv2d kernel needs a 'model' descriptor to fit from")
    params = fit_rv2d_params(make_model(model_spec))
    return rv2d_kernel(params)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_theory(config):
    d = int(config.get("d", 1))
    family = config["family"]
    pts = _grid_points(config["zgrid"], d if family != "rv1d" else 1)
    rows = []
    if family == "rv1d":
        a_list = config.get("a")
        if a_list is None:
            raise ConfigError("rv1d needs 'a' (one value or a list)")
        kernels = [(float(a), rv1d_kernel(float(a))) for a in a_list]
        for a, kern in kernels:
            for z in np.atleast_1d(pts):
                rows.append(("rv1d", 1, a, z, kern.cov(z)))
        header = ["family", "d", "a", "z1", "cov"]
    elif family == "integrable":
        kern = integrable_kernel(d=d)
        header = ["family", "d", "a", "z1"] + (["z2"] if d == 2 else []) + ["cov"]
        for z in np.atleast_2d(pts.reshape(len(pts), -1)):
            base = ("integrable", d, "", *(float(c) for c in z))
            rows.append(base + (kern.cov(z if d > 1 else z[0]),))
        if d > 2:
            raise ConfigError("theory CSV emission supports d <= 2")
    else:
        kern = _kernel_from_config(config, 2)
        header = ["family", "d", "a", "z1", "z2", "cov"]
        for z in pts.reshape(len(pts), -1):
            rows.append(("rv2d", 2, kern.params.a_minus, float(z[0]), float(z[1]),
                         kern.cov(z)))
    _write_csv(config["out"], header, rows)
    _write_sidecar(config["out"] + ".meta.json", "theory", config, seed=None)
    return 0


def _matched_curve_theory(process, n, zgrid):
    model = process.beta
    if model is None:
        return [None] * len(zgrid)
    out = []
    if process.d == 1:
        var = var_finite_1d(model, n)
        for z in zgrid:
            out.append(cov_finite_1d(model, n, float(z)) / var)
    else:
        var = var_finite_2d(model, n)
        for z in zgrid:
            out.append(cov_finite_2d(model, n, z) / var)
    return out


def cmd_simulate(config):
    process = make_process(config["process"])
    n = float(config["n"])
    replicas = int(config["replicas"])
    seed = int(config["seed"])
    threads = resolve_threads(config.get("threads"))
    out_dir = config["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    written = []
    try:
        zgrid = _grid_points(config["zgrid"], process.d)
        curve = estimate_cov_curve(process, n, zgrid, replicas, seed, threads=threads)
        theory_col = _matched_curve_theory(process, n, zgrid.reshape(len(zgrid), -1)
                                           if process.d == 2 else zgrid)
        rows = []
        for i, z in enumerate(np.atleast_2d(zgrid.reshape(len(zgrid), -1))):
            rows.append((process.label(), process.d, n, replicas,
                         *(float(c) for c in z),
                         curve.cov_hat[i], curve.se[i], theory_col[i]))
        header = (["process", "d", "n", "R", "z1"] + (["z2"] if process.d == 2 else [])
                  + ["cov_hat", "se", "cov_theory"])
        path = os.path.join(out_dir, "cov_curve.csv")
        _write_csv(path, header, rows)
        written.append(path)

        n_grid = config.get("n_grid")
        if n_grid is None:
            n_grid, nn = [], 8.0
            while nn < n:
                n_grid.append(nn)
                nn *= 2.0
            n_grid.append(n)
        var_replicas = int(config.get("var_replicas", max(100, replicas // 10)))
        table = estimate_variance_growth(process, n_grid, var_replicas, seed,
                                         threads=threads)
        path = os.path.join(out_dir, "var_growth.csv")
        _write_csv(path, ["n", "var_hat", "se"],
                   list(zip(table.n, table.var_hat, table.se)))
        written.append(path)

        path_replicas = int(config.get("path_replicas", 2))
        rows = []
        if process.d == 1:
            for rep in range(path_replicas):
                path_vals = coarse_grained_path(process, n, zgrid, seed, rep,
                                                var_ref=curve.var_hat)
                rows.extend((rep, float(z), v) for z, v in zip(zgrid, path_vals))
        path = os.path.join(out_dir, "paths.csv")
        _write_csv(path, ["replica", "z", "value"], rows)
        written.append(path)
        _write_sidecar(os.path.join(out_dir, "run.meta.json"), "simulate", config, seed)
    except Exception:
        for p in written:
            if os.path.exists(p):
                os.remove(p)
        raise
    return 0


def _read_curve_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    idx = {name: i for i, name in enumerate(header)}
    for req in ("z1", "cov_hat", "se"):
        if req not in idx:
            raise CompareError(f"curve CSV lacks required column {req!r}")
    d = 2 if "z2" in idx else 1
    z = np.array([[float(r[idx["z1"]])] + ([float(r[idx["z2"]])] if d == 2 else [])
                  for r in rows])
    cov_hat = np.array([float(r[idx["cov_hat"]]) for r in rows])
    se = np.array([float(r[idx["se"]]) for r in rows])
    return d, z, cov_hat, se


def cmd_compare(config):
    curve_path = config["curve"]
    d, z, cov_hat, se = _read_curve_csv(curve_path)

    meta_path = os.path.join(os.path.dirname(curve_path) or ".", "run.meta.json")
    if os.path.exists(meta_path) and not config.get("force", False):
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        recorded = meta.get("config_hash")
        recomputed = _config_hash(meta.get("config", {}))
        if recorded != recomputed:
            raise CompareError(
                f"sidecar config hash mismatch ({recorded} != {recomputed}); "
                f"pass force=true to compare anyway")
        expect = config.get("expect_hash")
        if expect is not None and expect != recorded:
            raise CompareError(
                f"run hash {recorded} does not match expected {expect}; "
                f"pass force=true to compare anyway")

    if "zgrid" in config:
        want = _grid_points(config["zgrid"], d).reshape(-1, d)
        if want.shape != z.shape or not np.allclose(want, z, atol=1e-9):
            raise CompareError("curve grid does not match the configured zgrid")

    kern = _kernel_from_config(config, d)
    if kern.d != d:
        raise CompareError(f"kernel dimension {kern.d} != curve dimension {d}")
    eps = float(config.get("epsilon", 0.01))
    tol = float(config.get("tolerance_sigmas", 3.0))
    theory = np.array([kern.cov(zz if d == 2 else zz[0]) for zz in z])
    dev = np.abs(cov_hat - theory) / np.maximum(se, eps)
    report = {
        "curve": curve_path,
        "family": config["family"],
        "tolerance_sigmas": tol,
        "epsilon": eps,
        "max_deviation": float(dev.max()),
        "pass": bool(dev.max() <= tol),
        "per_z": [
            {"z": list(map(float, zz)), "cov_hat": float(ch), "se": float(s),
             "cov_theory": float(th), "deviation": float(dv)}
            for zz, ch, s, th, dv in zip(z, cov_hat, se, theory, dev)
        ],
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if config.get("out"):
        with open(config["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hyperbox",
        description="Box-count covariance toolkit for hyperuniform point processes")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="tabulate a limit kernel to CSV")
    p.add_argument("--config")
    p.add_argument("--family", choices=["integrable", "rv1d", "rv2d"])
    p.add_argument("--d", type=int)
    p.add_argument("--a", type=lambda s: [float(x) for x in s.split(",")])
    p.add_argument("--model", type=json.loads)
    p.add_argument("--zgrid", type=_parse_zgrid_flag)
    p.add_argument("--zgrid-lattice", dest="zgrid_lattice", type=int)
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="Monte Carlo run to CSV files")
    p.add_argument("--config")
    p.add_argument("--process", type=json.loads)
    p.add_argument("--n", type=float)
    p.add_argument("--zgrid", type=_parse_zgrid_flag)
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--threads", type=int)
    p.add_argument("--n-grid", dest="n_grid", type=lambda s: [float(x) for x in s.split(",")])
    p.add_argument("--var-replicas", dest="var_replicas", type=int)
    p.add_argument("--path-replicas", dest="path_replicas", type=int)

    p = sub.add_parser("compare", help="check a curve CSV against a limit kernel")
    p.add_argument("--config")
    p.add_argument("--curve")
    p.add_argument("--family", choices=["integrable", "rv1d", "rv2d"])
    p.add_argument("--a", type=float)
    p.add_argument("--model", type=json.loads)
    p.add_argument("--zgrid", type=_parse_zgrid_flag)
    p.add_argument("--tolerance-sigmas", dest="tolerance_sigmas", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true", default=None)
    p.add_argument("--expect-hash", dest="expect_hash")
    return parser


_KEYS = {
    "theory": ["family", "d", "a", "model", "zgrid", "out"],
    "simulate": ["process", "n", "zgrid", "replicas", "seed", "out_dir", "threads",
                 "n_grid", "var_replicas", "path_replicas"],
    "compare": ["curve", "family", "a", "model", "zgrid", "tolerance_sigmas",
                "epsilon", "out", "force", "expect_hash"],
}


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    # let `--zgrid -3:3:0.01` through argparse's negative-number heuristic
    merged = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--zgrid" and i + 1 < len(argv) and ":" in argv[i + 1]:
            merged.append(f"--zgrid={argv[i + 1]}")
            skip = True
        else:
            merged.append(tok)
    parser = _build_parser()
    args = parser.parse_args(merged)
    command = args.command
    try:
        config = _merge_config(args, _KEYS[command])
        if command == "theory" and getattr(args, "zgrid_lattice", None) is not None:
            config["zgrid"] = {"lattice": args.zgrid_lattice}
        _validate(command, config)
        if command == "simulate" and config["replicas"] < 20:
            raise EstimatorError(
                f"insufficient replicas for standard errors: {config['replicas']}")
        return {"theory": cmd_theory, "simulate": cmd_simulate,
                "compare": cmd_compare}[command](config)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, TheoryError, KernelError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (SamplerError, EstimatorError) as exc:
        print(f"sampler error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except CompareError as exc:
        print(f"comparison error: {exc}", file=sys.stderr)
        return EXIT_COMPARE


if __name__ == "__main__":
    sys.exit(main())
