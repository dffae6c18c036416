"""Command-line front end.

Usage::

    tracetails <bounds|samplesize|verify|estimate|worstcase> --config FILE
               [--seed N] [--out PATH] [--format csv|json] [--force]

The config is one JSON object. Unknown keys are rejected. Reports are
written once at the end, so a failed run leaves no output file.

Exit codes: 0 ok, 2 config, 3 numeric, 4 region refusal, 5 proved-claim
failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import _accel
from .bounds import BoundQuery, compare_report, rows_to_csv, sample_size
from .errors import (DegenerateDistributionError, NumericalError, PoleError, PreconditionError,
                     RegionRefusal)
from .extremal import (AbsFamily, RelFamily, abs_tail_region, effective_rank, extremal_abs_law,
                       extremal_rel_law, matrix_tail_epsilons, qabs_family, qrel_family, rel_tail_region,
                       stable_rank, worst_abs_spectrum, worst_rel_spectrum)
from .trace_estimator import EstimatorRun, empirical_tail, run_estimates
from .verify import SCHEMA_VERSION, conjecture_probe, dominance_suite

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_REFUSAL, EXIT_FAILED = 0, 2, 3, 4, 5
COMMANDS = ("bounds", "samplesize", "verify", "estimate", "worstcase")

_FAMILY = {"mode", "mu", "lam", "phi"}
KEYS = {
    "bounds": _FAMILY | {"m", "epsilons", "eps_grid"},
    "samplesize": _FAMILY | {"epsilon", "delta", "method", "force"},
    "verify": {"suite", "kind", "mu", "lam", "phi", "m", "alpha", "pairs", "trials", "x_points", "t_points"},
    "estimate": {"spectrum", "m", "reps", "epsilon", "tail_mode"},
    "worstcase": _FAMILY | {"m"},
}
COMMON = {"command", "seed", "out", "format"}


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# config parsing
# --------------------------------------------------------------------------

def _num(cfg, key, *, default=None, positive=False, required=True):
    if key not in cfg:
        if required and default is None:
            raise ConfigError(f"missing key '{key}'")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"'{key}' must be a finite number")
    if positive and not v > 0:
        raise ConfigError(f"'{key}' must be positive")
    return float(v)


def _int(cfg, key, *, default=None, minimum=0):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing key '{key}'")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"'{key}' must be an integer")
    if v < minimum:
        raise ConfigError(f"'{key}' must be at least {minimum}")
    return v


def _choice(cfg, key, options, default=None):
    v = cfg.get(key, default)
    if v not in options:
        raise ConfigError(f"'{key}' must be one of {', '.join(options)}")
    return v


def _family(cfg, mode_key="mode"):
    mode = _choice(cfg, mode_key, ("relative", "absolute"))
    if mode == "relative":
        if "lam" in cfg or "phi" in cfg:
            raise ConfigError("relative mode takes 'mu', not 'lam'/'phi'")
        return mode, RelFamily(_num(cfg, "mu", positive=True))
    if "mu" in cfg:
        raise ConfigError("absolute mode takes 'lam' and 'phi', not 'mu'")
    return mode, AbsFamily(_num(cfg, "lam", positive=True), _num(cfg, "phi", positive=True))


def load_config(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - KEYS[command] - COMMON)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if cfg.get("command", command) != command:
        raise ConfigError(f"config is for '{cfg['command']}', not '{command}'")
    return cfg


def _provenance(command: str, cfg: dict) -> dict:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return {"command": command, "config_sha256": hashlib.sha256(canon.encode()).hexdigest()}


# --------------------------------------------------------------------------
# commands; each returns (exit code, text or None, one-line message or None)
# --------------------------------------------------------------------------

def cmd_bounds(cfg: dict, fmt: str):
    mode, fam = _family(cfg)
    m = _int(cfg, "m", minimum=1)
    if "epsilons" in cfg and "eps_grid" in cfg:
        raise ConfigError("give either 'epsilons' or 'eps_grid', not both")
    grid = None
    if "epsilons" in cfg:
        eps = cfg["epsilons"]
        if not isinstance(eps, list) or not eps:
            raise ConfigError("'epsilons' must be a non-empty list")
        grid = [_num({"e": e}, "e", positive=True) for e in eps]
    elif "eps_grid" in cfg:
        g = cfg["eps_grid"]
        if not isinstance(g, dict) or set(g) - {"start", "stop", "num"}:
            raise ConfigError("'eps_grid' takes keys start, stop, num")
        lo, hi = _num(g, "start", positive=True), _num(g, "stop", positive=True)
        n = _int(g, "num", minimum=1)
        if hi < lo:
            raise ConfigError("'eps_grid' stop must not be below start")
        grid = np.geomspace(lo, hi, n).tolist()
    rows = compare_report(mode, fam, m, grid)
    if fmt == "csv":
        return EXIT_OK, rows_to_csv(rows), None
    doc = {"schema_version": SCHEMA_VERSION, "mode": mode, "m": m, "family": _fam_dict(fam),
           "rows": [{"epsilon": r.epsilon, "ck_bound": r.ck_bound, "exact_tail": r.exact_tail,
                     "ratio": r.ratio, "region_status": r.region_status, "vacuous": r.vacuous} for r in rows],
           "provenance": _provenance("bounds", cfg)}
    return EXIT_OK, _dump(doc), None


def cmd_samplesize(cfg: dict, fmt: str, force: bool):
    mode, fam = _family(cfg)
    eps = _num(cfg, "epsilon", positive=True)
    delta = _num(cfg, "delta")
    if not 0 < delta < 1:
        raise ConfigError("'delta' must lie in (0, 1)")
    method = _choice(cfg, "method", ("ck", "extremal"), "ck")
    force = force or bool(cfg.get("force", False))
    q = BoundQuery(1, eps, mode, fam)
    res = sample_size(q, delta, method, force=force)
    line = f"m={res.m} method={res.method} bound={res.bound!r} status={res.status} ({res.note})"
    if fmt == "csv":
        text = f"m,method,bound,status\n{res.m},{res.method},{res.bound!r},{res.status}\n"
    else:
        text = _dump({"schema_version": SCHEMA_VERSION, "m": res.m, "method": res.method, "bound": res.bound,
                      "status": res.status, "note": res.note, "epsilon": eps, "delta": delta, "mode": mode,
                      "family": _fam_dict(fam), "provenance": _provenance("samplesize", cfg)})
    return EXIT_OK, text, line


def cmd_verify(cfg: dict, fmt: str, seed: int):
    if fmt != "json":
        raise ConfigError("verify reports are JSON only")
    suite = _choice(cfg, "suite", ("relative", "absolute", "probe"))
    if suite == "probe":
        kind = _choice(cfg, "kind", ("relative", "absolute"))
        alpha = _num(cfg, "alpha", positive=True)
        trials = _int(cfg, "trials", default=50, minimum=1)
        params = _num(cfg, "mu", positive=True) if kind == "relative" else \
            (_num(cfg, "lam", positive=True), _num(cfg, "phi", positive=True))
        rep = conjecture_probe(kind, params, alpha, trials, seed)
        rep["verdict"] = "report-only"
        rep["provenance"] = {"status": rep["provenance"], **_provenance("verify", cfg)}
        return EXIT_OK, _dump(rep), None
    _, fam = _family(dict(cfg, mode=suite), "mode")
    m = _int(cfg, "m", minimum=1)
    rep = dominance_suite(suite, fam, m, _int(cfg, "pairs", default=50, minimum=1), seed,
                          _int(cfg, "x_points", default=64, minimum=2), _int(cfg, "t_points", default=33, minimum=2))
    rep["provenance"] = {"status": rep["provenance"], **_provenance("verify", cfg)}
    code = EXIT_OK if rep["verdict"] == "pass" else EXIT_FAILED
    msg = None if code == EXIT_OK else "a proved-region dominance check failed; this signals an evaluator bug"
    return code, _dump(rep), msg


def cmd_estimate(cfg: dict, fmt: str, seed: int):
    s = cfg.get("spectrum")
    if not isinstance(s, list) or not s:
        raise ConfigError("'spectrum' must be a non-empty list of numbers")
    spec = [_num({"v": v}, "v") for v in s]
    m = _int(cfg, "m", minimum=1)
    reps = _int(cfg, "reps", minimum=0)
    eps = _num(cfg, "epsilon", required=False, positive=True)
    tail_mode = _choice(cfg, "tail_mode", ("absolute", "relative"), "absolute")
    run = EstimatorRun(np.asarray(spec), m, reps, seed)
    if tail_mode == "relative" and eps is not None and run.trace == 0:
        raise ConfigError("relative tail needs a nonzero trace")
    doc = {"schema_version": SCHEMA_VERSION, "trace": run.trace, "m": m, "reps": reps, "seed": seed,
           "mean": None, "variance": None, "theoretical_variance": 2.0 * float(np.sum(run.spectrum ** 2)) / m,
           "tail": None, "backend": _accel.backend(), "provenance": _provenance("estimate", cfg)}
    if reps > 0:
        est = run_estimates(run)
        doc["mean"] = float(est.mean())
        doc["variance"] = float(est.var(ddof=1)) if reps > 1 else None
        if eps is not None:
            tf = empirical_tail(run, eps, tail_mode, est)
            doc["tail"] = {"epsilon": eps, "mode": tail_mode, "frequency": tf.frequency,
                           "half_width_95": tf.half_width, "exceed": tf.exceed}
    if fmt == "csv":
        tail = doc["tail"] or {}
        vals = [doc["trace"], doc["mean"], doc["variance"], tail.get("frequency"), tail.get("half_width_95")]
        text = "trace,mean,variance,tail_frequency,half_width\n" + \
            ",".join("" if v is None else repr(float(v)) for v in vals) + "\n"
    else:
        text = _dump(doc)
    line = f"mean={doc['mean']!r} variance={doc['variance']!r}" if reps > 0 else "reps=0: no statistics"
    return EXIT_OK, text, line


def cmd_worstcase(cfg: dict, fmt: str):
    if fmt != "json":
        raise ConfigError("worstcase reports are JSON only")
    mode, fam = _family(cfg)
    m = _int(cfg, "m", default=0, minimum=0)
    doc = {"schema_version": SCHEMA_VERSION, "mode": mode, "family": _fam_dict(fam),
           "provenance": _provenance("worstcase", cfg)}
    if mode == "relative":
        s = worst_rel_spectrum(fam)
        doc["spectrum"] = s.entries.tolist()
        doc["effective_rank"] = effective_rank(s)
    else:
        s = worst_abs_spectrum(fam)
        doc["spectrum"] = s.entries.tolist()
        doc["stable_rank"] = stable_rank(s)
    if m:
        alpha = m / 2.0
        if mode == "relative":
            p = extremal_rel_law(fam, m)
            doc["law"] = {"shape": p.shape, "rate": p.rate, "sign": 1}
            doc["regions"] = rel_tail_region(qrel_family(fam.mu, m), alpha).as_dict()
        else:
            sign, p = extremal_abs_law(fam, m)
            doc["law"] = {"shape": p.shape, "rate": p.rate, "sign": sign}
            doc["regions"] = abs_tail_region(qabs_family(fam, m), alpha).as_dict()
        me = matrix_tail_epsilons(m, fam)
        doc["matrix_epsilon"] = {"epsilon": me.epsilon, "status": me.status, "asymptote": me.asymptote,
                                 "note": me.note}
    return EXIT_OK, _dump(doc), None


# --------------------------------------------------------------------------

def _fam_dict(fam) -> dict:
    return {"mu": fam.mu} if isinstance(fam, RelFamily) else {"lam": fam.lam, "phi": fam.phi}


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tracetails", description="Tail bounds for the Gaussian trace estimator.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    ap.add_argument("--out", default=None, help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default=None)
    ap.add_argument("--force", action="store_true", help="allow answers outside the proved tail region")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.command)
        seed = args.seed if args.seed is not None else _int(cfg, "seed", default=0)
        cfg = dict(cfg, seed=seed)
        fmt = args.format or cfg.get("format") or ("csv" if args.command == "bounds" else "json")
        if fmt not in ("csv", "json"):
            raise ConfigError("'format' must be csv or json")
        out = args.out or cfg.get("out")
        if args.command == "bounds":
            code, text, line = cmd_bounds(cfg, fmt)
        elif args.command == "samplesize":
            code, text, line = cmd_samplesize(cfg, fmt, args.force)
        elif args.command == "verify":
            code, text, line = cmd_verify(cfg, fmt, seed)
        elif args.command == "estimate":
            code, text, line = cmd_estimate(cfg, fmt, seed)
        else:
            code, text, line = cmd_worstcase(cfg, fmt)
    except (ConfigError, PreconditionError, PoleError, DegenerateDistributionError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RegionRefusal as exc:
        print(f"refused: {exc} (use --force to override)", file=sys.stderr)
        return EXIT_REFUSAL
    except (NumericalError, FloatingPointError, OverflowError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif args.command != "samplesize":
        sys.stdout.write(text)
    if line and (out or args.command == "samplesize"):
        print(line)
    elif code != EXIT_OK and line:
        print(line, file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
