"""Command line interface.

Every subcommand accepts ``--config FILE`` with ``key=value`` lines; flags on
the command line take precedence.  CSV outputs start with one ``#`` line that
echoes the resolved configuration.  Usage errors exit with status 2 and
numerical failures with status 1.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from .errors import NumericalFailure, ResourceError, ValidationError

DEFAULTS = {
    "m": None, "n": None, "alpha": None, "tau": None, "h_max": None,
    "reps": 100, "seed": 0, "order": 60, "s_min": -6.0, "s_max": 4.0, "s_step": 0.25,
    "mode": "mp", "out": None, "eps": 1e-6, "t": None, "n_list": None, "samples_out": None,
    "M": 60, "K": 8, "N": None,
}

_TYPES = {
    "m": int, "n": int, "alpha": Fraction, "tau": Fraction, "h_max": int, "reps": int, "seed": int,
    "order": int, "s_min": float, "s_max": float, "s_step": float, "mode": str, "out": str,
    "eps": float, "t": str, "n_list": str, "samples_out": str, "M": int, "K": int, "N": int,
}

# keys echoed in the header of each subcommand
_KEYS = {
    "constants": ["alpha", "tau"],
    "exact-cdf": ["m", "n", "alpha", "h_max", "eps", "mode"],
    "sample": ["m", "n", "alpha", "reps", "seed"],
    "tw-table": ["s_min", "s_max", "s_step", "order"],
    "poisson": ["t", "reps", "seed"],
    "scaling-experiment": ["n_list", "alpha", "tau", "reps", "seed", "order"],
    "verify": ["m", "n", "alpha", "h_max", "M", "K", "N"],
}


class UsageError(Exception):
    pass


def _parse_value(key, raw):
    try:
        if _TYPES[key] is Fraction:
            return Fraction(raw)
        return _TYPES[key](raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad value for {key}: {raw!r}") from exc


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise UsageError(f"config line without '=': {ln!r}")
        key, raw = (s.strip() for s in ln.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise UsageError(f"unknown config key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    for flag in ("m", "n", "alpha", "tau", "h-max", "reps", "seed", "order", "s-min", "s-max",
                 "s-step", "out", "eps", "t", "n-list", "samples-out", "M", "K", "N"):
        p.add_argument(f"--{flag}", default=None)
    p.add_argument("--mode", default=None, choices=["rational", "float", "xfloat", "mp"])
    p.add_argument("--config", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftedschur", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("constants", "exact-cdf", "sample", "tw-table", "poisson", "scaling-experiment"):
        _add_common(sub.add_parser(name))
    v = sub.add_parser("verify")
    v.add_argument("target", choices=["gessel", "cauchy", "operators", "measure", "tableaux"])
    _add_common(v)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in _TYPES:
        raw = getattr(args, key, None)
        if raw is not None:
            cfg[key] = _parse_value(key, raw)
    return cfg


def _header(command: str, cfg: dict, extra: str = "") -> str:
    keys = _KEYS[command]
    body = " ".join(f"{k}={cfg[k]}" for k in keys)
    return f"# {command}{extra} {body}\n"


def _need(cfg, *keys):
    for k in keys:
        if cfg.get(k) is None:
            raise UsageError(f"--{k.replace('_', '-')} is required")


def _emit(text: str, cfg: dict) -> None:
    if cfg.get("out"):
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params(cfg):
    from .sampler import MeasureParams
    _need(cfg, "m", "n", "alpha")
    return MeasureParams(cfg["m"], cfg["n"], cfg["alpha"])


def cmd_constants(cfg):
    from .asymptotics import constants
    if cfg["tau"] is None and cfg["m"] is not None and cfg["n"] is not None:
        cfg["tau"] = Fraction(cfg["m"], cfg["n"])
    _need(cfg, "alpha", "tau")
    c = constants(float(cfg["alpha"]), float(cfg["tau"]))
    return _header("constants", cfg) + c.line() + "\n"


def cmd_exact_cdf(cfg):
    from .gessel import cdf_curve, cdf_exact, cdf_table
    params = _params(cfg)
    mode = cfg["mode"]
    if cfg["h_max"] is not None:
        if mode == "mp":
            vals = list(cdf_table(params, cfg["h_max"]))
        else:
            vals = [cdf_exact(params, h, mode) for h in range(cfg["h_max"] + 1)]
    else:
        vals = list(cdf_curve(params, cfg["eps"], mode=mode).cdf)
    rows = "".join(f"{h},{_fmt(v)}\n" for h, v in enumerate(vals))
    return _header("exact-cdf", cfg) + "h,cdf\n" + rows


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def cmd_sample(cfg):
    from .sampler import sample_lambda1_batch
    params = _params(cfg)
    vals = sample_lambda1_batch(params, cfg["seed"], cfg["reps"])
    rows = "".join(f"{k},{int(v)}\n" for k, v in enumerate(vals))
    return _header("sample", cfg) + "replica,lambda1\n" + rows


def cmd_tw_table(cfg):
    from .tracywidom import f2
    if cfg["s_step"] <= 0 or cfg["s_max"] < cfg["s_min"]:
        raise UsageError("need s_step > 0 and s_max >= s_min")
    count = int(math.floor((cfg["s_max"] - cfg["s_min"]) / cfg["s_step"] + 1e-9)) + 1
    grid = [cfg["s_min"] + k * cfg["s_step"] for k in range(count)]
    rows = "".join(f"{s:.6g},{f2(s, cfg['order'])!r}\n" for s in grid)
    return _header("tw-table", cfg) + "s,F2\n" + rows


def _float_list(raw: str, key: str) -> list[float]:
    try:
        return [float(x) for x in str(raw).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad list for {key}: {raw!r}") from exc


def cmd_poisson(cfg):
    from .sampler import Seed, poisson_L
    _need(cfg, "t")
    ts = _float_list(cfg["t"], "t")
    rows = []
    for idx, t in enumerate(ts):
        for k in range(cfg["reps"]):
            L = poisson_L(t, Seed(cfg["seed"], idx * cfg["reps"] + k))
            rows.append(f"{k},{t:g},{L}\n")
    return _header("poisson", cfg) + "replica,t,L\n" + "".join(rows)


def cmd_scaling(cfg):
    from .asymptotics import constants
    from .sampler import MeasureParams, sample_lambda1_batch
    from .tracywidom import ks_against_f2
    _need(cfg, "n_list", "alpha")
    tau = cfg["tau"] if cfg["tau"] is not None else Fraction(1)
    ns = [int(x) for x in _float_list(cfg["n_list"], "n_list")]
    c = constants(float(cfg["alpha"]), float(tau))
    rows, samples = [], []
    for n in ns:
        m = max(1, round(tau * n))
        vals = sample_lambda1_batch(MeasureParams(m, n, cfg["alpha"]), cfg["seed"] + n, cfg["reps"])
        ks = ks_against_f2(vals, c.c1, c.c2, n, cfg["order"])
        rows.append(f"{n},{m},{cfg['reps']},{ks!r}\n")
        scale = c.c2 * n ** (1 / 3)
        samples.extend(f"{n},{k},{int(v)},{(v - c.c1 * n) / scale!r}\n" for k, v in enumerate(vals))
    if cfg["samples_out"]:
        with open(cfg["samples_out"], "w") as fh:
            fh.write(_header("scaling-experiment", cfg) + "n,replica,lambda1,scaled\n" + "".join(samples))
    return _header("scaling-experiment", cfg) + "n,m,reps,ks\n" + "".join(rows)


def cmd_verify(cfg, target):
    from . import verify
    lines, ok = verify.run(target, cfg)
    text = _header("verify", cfg, f" target={target}") + "".join(line + "\n" for line in lines)
    return text, ok


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        if cfg["mode"] not in ("rational", "float", "xfloat", "mp"):
            raise UsageError(f"bad mode {cfg['mode']!r}")
        if args.command == "verify":
            text, ok = cmd_verify(cfg, args.target)
            _emit(text, cfg)
            return 0 if ok else 1
        handler = {
            "constants": cmd_constants, "exact-cdf": cmd_exact_cdf, "sample": cmd_sample,
            "tw-table": cmd_tw_table, "poisson": cmd_poisson, "scaling-experiment": cmd_scaling,
        }[args.command]
        _emit(handler(cfg), cfg)
        return 0
    except (UsageError, ValidationError) as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except (NumericalFailure, ResourceError, ArithmeticError) as exc:
        sys.stderr.write(f"{parser.prog}: numerical failure: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
