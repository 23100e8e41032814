"""Command line entry point: ``bigjump {estimate,sweep,scales,validate,oracle}``."""

import argparse
import logging
import os
import sys

import numpy as np

from .. import exactprob, weights
from ..errors import BigJumpError, ConfigError
from . import config as cfgmod
from . import runner

EXIT_OK, EXIT_CONFIG, EXIT_ROWS = 0, 1, 2


def _model_args(p):
    p.add_argument("--family", choices=["stretched", "loghazard", "geometric"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--ratio", type=float)


def _common(p):
    p.add_argument("--config", help="TOML config file, or - for stdin")
    p.add_argument("--out", help="output directory (stdout if omitted where applicable)")
    p.add_argument("--set", action="append", default=[], metavar="K=V", help="override a config key")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])


def build_parser():
    parser = argparse.ArgumentParser(prog="bigjump", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="asymptotic estimate at a single (n, N)")
    _common(p)
    _model_args(p)
    p.add_argument("-n", type=int)
    p.add_argument("-N", type=float)
    p.add_argument("--r", default=None, help="Cramer order or auto")
    p.add_argument("--oracle", action="store_true", help="compare with the exact convolution")

    p = sub.add_parser("sweep", help="run a configured (n, N) grid")
    _common(p)

    p = sub.add_parser("scales", help="critical scales table")
    _common(p)
    _model_args(p)
    p.add_argument("--n-list", type=lambda s: [int(float(v)) for v in s.split(",")])

    p = sub.add_parser("validate", help="assumption report on a grid")
    _common(p)
    _model_args(p)
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=1e8)
    p.add_argument("--points", type=int, default=200)

    p = sub.add_parser("oracle", help="exact law of S_n as CSV")
    _common(p)
    _model_args(p)
    p.add_argument("-n", type=int)
    p.add_argument("--m-max", type=int)
    return parser


def _raw_config(args):
    """Config table from --config (if given) with command-line model flags layered on top."""
    raw = {}
    if args.config:
        try:
            text = sys.stdin.read() if args.config == "-" else open(args.config, encoding="utf-8").read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        try:
            raw = cfgmod.tomllib.loads(text)
        except cfgmod.tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config is not valid TOML: {exc}") from None
    model = raw.setdefault("model", {})
    for key in ("family", "alpha", "beta", "b", "ratio"):
        val = getattr(args, key, None)
        if val is not None:
            model[key] = val
    return cfgmod.apply_overrides(raw, args.set)


def _model_from(raw):
    section = dict(raw.get("model", {}))
    probe = cfgmod.validate({"model": section, "grid": {"n_list": [1], "N_rule": {"kind": "list", "values": [1]}}})
    family, params = runner._spec(probe.data)
    return family, params, runner.build_model(family, params)


def _emit(text, out, filename):
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, filename), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(args):
    raw = _raw_config(args)
    grid = raw.setdefault("grid", {})
    if args.n is not None:
        grid["n_list"] = [args.n]
    if args.N is not None:
        grid["N_rule"] = {"kind": "list", "values": [args.N]}
    if args.r is not None:
        raw.setdefault("estimate", {})["r"] = args.r if args.r == "auto" else int(args.r)
    if args.oracle:
        raw.setdefault("oracle", {})["enabled"] = True
    config = cfgmod.validate(raw)
    rows = runner.run_rows(config, 1)
    _emit(runner.rows_to_csv(rows), args.out, "estimate.csv")
    return EXIT_ROWS if any(r.failed for r in rows) else EXIT_OK


def cmd_sweep(args):
    if not args.config:
        raise ConfigError("sweep needs --config")
    config = cfgmod.validate(_raw_config(args))
    _, code = runner.run_experiment(config, args.out, args.jobs)
    return code


def cmd_scales(args):
    raw = _raw_config(args)
    n_list = args.n_list or raw.get("grid", {}).get("n_list")
    if not n_list:
        raise ConfigError("scales needs a non-empty n list (--n-list or grid.n_list)")
    family, params, _ = _model_from(raw)
    _emit(runner.scales_report(family, params, n_list), args.out, "scales.csv")
    return EXIT_OK


def cmd_validate(args):
    raw = _raw_config(args)
    family, params, model = _model_from(raw)
    x_min = args.x_min if args.x_min is not None else weights.tail_grid_start(model)
    grid = np.geomspace(x_min, args.x_max, args.points)
    rep = weights.validate_assumptions(model, grid)
    text = f"model: {model.label}\n{rep.summary()}\nc1={rep.c1!r} c2={rep.c2!r} c3={rep.c3!r} c4={rep.c4!r}\n"
    _emit(text, args.out, "assumptions.txt")
    return EXIT_OK if rep.passed else EXIT_ROWS


def cmd_oracle(args):
    raw = _raw_config(args)
    if args.n is None or args.m_max is None:
        raise ConfigError("oracle needs -n and --m-max")
    _, _, model = _model_from(raw)
    pmf = exactprob.convolve_exact(model, args.n, args.m_max)
    _emit(pmf.to_csv(), args.out, "oracle.csv")
    return EXIT_OK


COMMANDS = {"estimate": cmd_estimate, "sweep": cmd_sweep, "scales": cmd_scales,
            "validate": cmd_validate, "oracle": cmd_oracle}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BigJumpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ROWS


if __name__ == "__main__":
    sys.exit(main())
