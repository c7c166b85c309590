"""Command-line front end.

    teurkit analyze     --model NAME [--params JSON] [--theta t1,t2]
    teurkit teur-check  [--E e11,e12,e22 | --input SIM.json] [--r R --phi PHI ...]
    teurkit sweep       --grid NAME=START:STOP:COUNT [--grid ...] [scheme flags]
    teurkit simulate    --trials N --n N [--seed S] [--raw PATH] [scheme flags]
    teurkit ellipse     [--grid ...] [--E ...] [--kappa K] [--points N]

Exit codes: 0 success (or inequality satisfied), 1 inequality violated,
2 configuration error, 3 numerical error.
"""

import argparse
import ast
import csv
import io
import json
import operator
import os
import sys

import numpy as np

from . import ellipse, fisher, gaussian, tradeoff
from .errors import ConfigError, NumericalError
from .model import make_model

EXIT_OK, EXIT_VIOLATED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("analyze", "teur-check", "sweep", "simulate", "ellipse")
SCHEME_KEYS = ("r", "phi", "r_anc", "phi_anc", "n", "alpha")

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_number(text):
    """Parse a real number, allowing arithmetic with ``pi`` (e.g. ``-pi/3``)."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return float(np.pi)
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse number {text!r}") from None


def parse_vector(text, length=None):
    if isinstance(text, (list, tuple)):
        vals = [parse_number(x) for x in text]
    else:
        vals = [parse_number(x) for x in str(text).split(",") if x.strip()]
    if length is not None and len(vals) != length:
        raise ConfigError(f"expected {length} comma-separated values, got {text!r}")
    return vals


def parse_grid(spec):
    """``name=start:stop:count`` -> ``(name, values)``; values may also be a list."""
    try:
        name, rng = str(spec).split("=", 1)
        start, stop, count = rng.split(":")
    except ValueError:
        raise ConfigError(f"grid must look like name=start:stop:count, got {spec!r}") from None
    count = int(parse_number(count))
    if count < 1:
        raise ConfigError(f"grid {spec!r} has no points")
    return name.strip(), list(np.linspace(parse_number(start), parse_number(stop), count))


def build_parser():
    p = argparse.ArgumentParser(prog="teurkit", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with default settings")
    p.add_argument("--model", help="built-in model name")
    p.add_argument("--params", help="model parameters as a JSON object")
    p.add_argument("--theta", help="parameter point, e.g. '0,0'")
    p.add_argument("--povm", help="'computational' or a JSON list of matrices")
    p.add_argument("--r", type=str)
    p.add_argument("--phi", type=str)
    p.add_argument("--r-anc", dest="r_anc", type=str)
    p.add_argument("--phi-anc", dest="phi_anc", type=str)
    p.add_argument("--alpha", help="true displacement 're,im'")
    p.add_argument("--n", type=str, help="samples per experiment")
    p.add_argument("--trials", type=str)
    p.add_argument("--seed", type=str)
    p.add_argument("--workers", type=int)
    p.add_argument("--grid", action="append", help="name=start:stop:count (repeatable)")
    p.add_argument("--E", dest="E", help="sample-scaled covariance 'e11,e12,e22'")
    p.add_argument("--input", help="simulate output JSON to use as covariance source")
    p.add_argument("--gamma", type=str)
    p.add_argument("--kappa", type=str)
    p.add_argument("--points", type=str)
    p.add_argument("--raw", help="write raw outcomes of trial 0 as CSV")
    p.add_argument("--output", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    return p


def load_config(args):
    """Merge the config file (if any) with flags; flags win."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg = dict(cfg)
        if isinstance(cfg.get("model"), dict):
            m = cfg.pop("model")
            cfg["model"] = m.get("name")
            cfg.setdefault("params", m.get("params", {}))
        if isinstance(cfg.get("scheme"), dict):
            for k, v in cfg.pop("scheme").items():
                cfg.setdefault(k, v)
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "command"):
            cfg[key] = val
    if isinstance(cfg.get("params"), str):
        try:
            cfg["params"] = json.loads(cfg["params"])
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}") from exc
    if "seed" not in cfg and os.environ.get("TEURKIT_SEED"):
        cfg["seed"] = os.environ["TEURKIT_SEED"]
    cfg["command"] = args.command
    return cfg


def _int(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required setting {key!r}")
        return default
    v = parse_number(cfg[key])
    if v != int(v):
        raise ConfigError(f"{key} must be an integer")
    return int(v)


def scheme_from(cfg, base=None):
    fields = dict(base or {})
    for key in SCHEME_KEYS:
        if key not in cfg:
            continue
        if key == "alpha":
            re_, im_ = parse_vector(cfg[key], 2)
            fields["alpha"] = complex(re_, im_)
        elif key == "n":
            fields["n"] = _int(cfg, "n")
        else:
            fields[key] = parse_number(cfg[key])
    return gaussian.GaussianScheme.from_dict(fields)


def _matrix(obj):
    if isinstance(obj, dict):
        return np.asarray(obj["real"], dtype=float) + 1j * np.asarray(obj.get("imag", 0.0))
    return np.asarray(obj, dtype=complex)


def povm_from(cfg, dim):
    spec = cfg.get("povm")
    if spec is None:
        return None
    if isinstance(spec, str) and spec.strip() == "computational":
        return fisher.FinitePOVM.projective(np.eye(dim))
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError:
            raise ConfigError(f"unknown POVM {spec!r}") from None
    try:
        return fisher.FinitePOVM([_matrix(m) for m in spec])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid POVM: {exc}") from exc


def _model(cfg):
    name = cfg.get("model")
    if not name:
        raise ConfigError("missing model name (--model)")
    params = cfg.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("model parameters must be a JSON object")
    model = make_model(name, **params)
    theta = parse_vector(cfg.get("theta", [0.0] * model.n_params), model.n_params)
    return model, np.array(theta)


def _grid(cfg):
    """Grid from flags (list of strings) or config (name -> spec or value list)."""
    specs = cfg.get("grid")
    if specs is None:
        return []
    if isinstance(specs, str):
        specs = [specs]
    if isinstance(specs, dict):
        return [
            (name, [parse_number(v) for v in spec]) if isinstance(spec, list)
            else parse_grid(f"{name}={spec}")
            for name, spec in specs.items()
        ]
    return [parse_grid(s) for s in specs]


def _format(cfg, allowed, default):
    fmt = cfg.get("format", default)
    if fmt not in allowed:
        raise ConfigError(f"format {fmt!r} not supported here; use one of {allowed}")
    return fmt


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def cmd_analyze(cfg):
    _format(cfg, ("json",), "json")
    model, theta = _model(cfg)
    povm = povm_from(cfg, model.dim)
    m = tradeoff.analyze(model, theta, povm)
    out = {"model": cfg["model"], "theta": theta.tolist(), **m.to_dict()}
    return _json(out), EXIT_OK


def _qfim_gamma(cfg, scheme):
    if cfg.get("model"):
        model, theta = _model(cfg)
        r = model.rho(theta)
        ls = fisher.slds(model, theta)
        fq = fisher.qfim(r, ls)
        return fq, fisher.incompat_gamma(r, ls, fq)
    gamma = parse_number(cfg["gamma"]) if "gamma" in cfg else gaussian.GAMMA
    return gaussian.qfim_displacement(scheme.r, scheme.phi), gamma


def _covariance(cfg, scheme):
    if "E" in cfg:
        e = cfg["E"]
        if isinstance(e, str) or (isinstance(e, list) and len(e) == 3 and not isinstance(e[0], list)):
            e11, e12, e22 = parse_vector(e, 3)
            return np.array([[e11, e12], [e12, e22]])
        return np.asarray(e, dtype=float)
    if "sample_cov" in cfg:
        return np.asarray(cfg["sample_cov"], dtype=float)
    return gaussian.joint_cov(scheme)


def _read_input(cfg):
    if "input" not in cfg:
        return cfg
    try:
        with open(cfg["input"]) as fh:
            sim = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read input {cfg['input']!r}: {exc}") from exc
    merged = dict(sim.get("scheme", {}))
    merged.update({k: v for k, v in cfg.items()})
    merged.setdefault("sample_cov", sim.get("sample_cov"))
    if merged["sample_cov"] is None:
        raise ConfigError("input file has no sample_cov")
    return merged


def cmd_teur_check(cfg):
    _format(cfg, ("json",), "json")
    cfg = _read_input(cfg)
    scheme = scheme_from(cfg)
    fq, gamma = _qfim_gamma(cfg, scheme)
    report = tradeoff.tradeoff_report(_covariance(cfg, scheme), fq, gamma)
    code = EXIT_OK if report.teur_satisfied else EXIT_VIOLATED
    return _json(report.to_dict()), code


def cmd_sweep(cfg):
    fmt = _format(cfg, ("csv", "json"), "csv")
    grid = _grid(cfg)
    if not grid:
        raise ConfigError("sweep needs a non-empty --grid")
    rows = gaussian.sweep(scheme_from(cfg), grid)
    if fmt == "json":
        return _json([dict(zip(gaussian.SWEEP_HEADER, map(float, r))) for r in rows]), EXIT_OK
    return _csv(gaussian.SWEEP_HEADER, rows), EXIT_OK


def cmd_simulate(cfg):
    _format(cfg, ("json",), "json")
    n_trials = _int(cfg, "trials")
    if n_trials < 1:
        raise ConfigError("trials must be at least 1")
    seed = _int(cfg, "seed", 0)
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    scheme = scheme_from(cfg)
    summary = gaussian.simulate(scheme, n_trials, seed, workers=cfg.get("workers") or 1)
    fq = gaussian.qfim_displacement(scheme.r, scheme.phi)
    out = {"scheme": scheme.to_dict(), "seed": seed, **summary.to_dict()}
    out["qfim"] = fq.tolist()
    out["gamma"] = gaussian.GAMMA
    out["teur_lhs"] = None
    if n_trials > 1:
        out["teur_lhs"] = tradeoff.teur_lhs(summary.sample_cov, fq, gaussian.GAMMA, check_bound=False)
    if cfg.get("raw"):
        rec = gaussian.measurement_record(scheme, seed, 0)
        _write(cfg["raw"], _csv(("a", "b"), rec.samples.tolist()))
    return _json(out), EXIT_OK


def cmd_ellipse(cfg):
    fmt = _format(cfg, ("csv", "json"), "csv")
    kappa = parse_number(cfg.get("kappa", 1.0))
    if not kappa > 0:
        raise ConfigError("kappa must be positive")
    n_points = _int(cfg, "points", 256)
    if n_points < 4:
        raise ConfigError("points must be at least 4")
    base = scheme_from(cfg)
    fq, _ = _qfim_gamma(cfg, base)
    center = tuple(base.theta)
    items = [("quantum", ellipse.quantum_limited_ellipse(fq, center, kappa), {})]
    if "E" in cfg:
        items.append(("error", ellipse.error_ellipse(_covariance(cfg, base), center, kappa), {}))
    else:
        grid = _grid(cfg)
        points = gaussian.grid_schemes(base, grid) if grid else [({}, base)]
        for k, (params, scheme) in enumerate(points):
            e = ellipse.error_ellipse(gaussian.joint_cov(scheme), center, kappa)
            items.append((f"error_{k}", e, params))
    if fmt == "json":
        out = []
        for eid, e, params in items:
            out.append({
                "ellipse_id": eid,
                "params": params,
                "center": list(e.center),
                "A": e.A.tolist(),
                "kappa": e.kappa,
                "metrics": ellipse.metrics(e).to_dict(),
                "points": ellipse.polyline(e, n_points).tolist(),
            })
        return _json(out), EXIT_OK
    rows = []
    for eid, e, _ in items:
        rows.extend((eid, float(x), float(y)) for x, y in ellipse.polyline(e, n_points))
    return _csv(("ellipse_id", "x", "y"), rows), EXIT_OK


HANDLERS = {
    "analyze": cmd_analyze,
    "teur-check": cmd_teur_check,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "ellipse": cmd_ellipse,
}


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def run(cfg):
    """Execute a merged config; returns ``(text, exit_code)``."""
    return HANDLERS[cfg["command"]](cfg)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        cfg = load_config(args)
        text, code = run(cfg)
        if cfg.get("output"):
            _write(cfg["output"], text)
        else:
            sys.stdout.write(text)
        return code
    except ConfigError as exc:
        print(f"teurkit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"teurkit: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"teurkit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
