"""Command-line experiment driver.

Every subcommand accepts ``--config file.json``; keys mirror the long flag
names (``sizes``, ``p1``, ``seed``, ...). Explicit flags override the file.
Reports embed the fully resolved configuration.

Exit codes: 0 success, 2 input or configuration error, 3 failed numerical check.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .groups import lambda_coefficients, lambda_matrix, parse_group, parse_lattice
from .io import FormatError, read_matrix, write_json, write_matrix
from .linalg import parse_exponent
from .multipliers import fourier_coefficients, schur_apply
from .normest import EstimatorConfig
from .symbols import SymbolTensor
from .transference import NumericalCheckError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

DEFAULTS = {
    "trunc-growth": {"sizes": "8,16,32,64,128,256,512"},
    "bht-lower": {"sizes": "8,16,32,64", "p1": "2", "p2": "2", "restarts": 8},
    "cz-lower": {"sizes": "8,16,32,64", "lambda_rule": "2^i", "restarts": 8},
    "szego": {"symbol": "1=1,-1=1", "p": "2,4,inf", "sizes": "10,50,100,500,1000,2000"},
    "transfer-check": {"group": "cyclic:4", "n": 2, "symbol": "random", "p": "2,2",
                       "p_out": "1", "batch": 10, "restarts": 8},
    "apply": {"mode": "schur"},
}
COMMON = {"seed": 0, "out": None, "format": None, "max_iters": 200, "rel_tol": 1e-8}


class InputError(ValueError):
    pass


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _exp_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [parse_exponent(str(v)) for v in text]
    return [parse_exponent(v) for v in str(text).split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multrans", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with default values for any flag")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default: stdout)")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="format", action="store_const", const="json")
        fmt.add_argument("--csv", dest="format", action="store_const", const="csv")

    def estimator(p):
        p.add_argument("--restarts", type=int)
        p.add_argument("--max-iters", dest="max_iters", type=int)
        p.add_argument("--rel-tol", dest="rel_tol", type=float)

    p = sub.add_parser("trunc-growth", help="triangular truncation of the all-ones matrix")
    common(p)
    p.add_argument("--sizes", help="comma-separated N values")

    p = sub.add_parser("bht-lower", help="lower bounds for the lifted bilinear Hilbert symbol")
    common(p)
    estimator(p)
    p.add_argument("--sizes", help="comma-separated window radii N")
    p.add_argument("--p1")
    p.add_argument("--p2")

    p = sub.add_parser("cz-lower", help="S_1 lower bounds for (1 + phi)/2 on a Davies sequence")
    common(p)
    estimator(p)
    p.add_argument("--sizes", help="comma-separated N values")
    p.add_argument("--lambda-rule", dest="lambda_rule", choices=["2^i", "i"])

    p = sub.add_parser("szego", help="Toeplitz compressions against torus norms")
    common(p)
    p.add_argument("--symbol", help='lattice function, e.g. "1=1,-1=1"')
    p.add_argument("--p", help="comma-separated exponents")
    p.add_argument("--sizes", help="comma-separated window radii M")

    p = sub.add_parser("transfer-check", help="Schur vs Fourier estimates with witness lifting")
    common(p)
    estimator(p)
    p.add_argument("--group", help="cyclic:m, dihedral:m or product:A,B")
    p.add_argument("--n", type=int, help="arity")
    p.add_argument("--symbol", help="random, ones, or comma-separated values (n = 1)")
    p.add_argument("--p", help="comma-separated input exponents")
    p.add_argument("--p-out", dest="p_out", help="output exponent")
    p.add_argument("--batch", type=int, help="number of symbols")

    p = sub.add_parser("apply", help="evaluate a multiplier on matrix files")
    common(p)
    p.add_argument("--mode", choices=["schur", "fourier"])
    p.add_argument("--symbol", help="symbol tensor JSON file")
    p.add_argument("--group", help="group for fourier mode")
    p.add_argument("inputs", nargs="*", help="input matrix files")
    return parser


def resolve(args) -> dict:
    """Defaults < config file < explicit flags."""
    cfg = dict(COMMON)
    cfg.update(DEFAULTS[args.command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        if key == "inputs" and not val:
            continue
        cfg[key] = val
    cfg["command"] = args.command
    return cfg


def _estimator(cfg) -> EstimatorConfig:
    return EstimatorConfig(restarts=int(cfg.get("restarts", 32)), max_iters=int(cfg["max_iters"]),
                           rel_tol=float(cfg["rel_tol"]), seed=int(cfg["seed"]))


def _emit(cfg, report: dict, default_format: str):
    fmt = cfg.get("format") or default_format
    report = {"config": cfg, **report}
    out = cfg.get("out")
    if fmt == "csv":
        rows = report.get("rows") or report.get("reports") or []
        if not rows:
            raise InputError("this report has no table to write as CSV")
        fh = open(out, "w", newline="") if out else sys.stdout
        try:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        finally:
            if out:
                fh.close()
    elif out:
        write_json(out, report)
    else:
        json.dump(report, sys.stdout, indent=2, sort_keys=True, default=float)
        sys.stdout.write("\n")


def cmd_trunc_growth(cfg):
    _emit(cfg, experiments.trunc_growth(_int_list(cfg["sizes"])), "csv")


def cmd_bht_lower(cfg):
    rep = experiments.bht_lower(_int_list(cfg["sizes"]), parse_exponent(str(cfg["p1"])),
                                parse_exponent(str(cfg["p2"])), _estimator(cfg))
    _emit(cfg, rep, "json")


def cmd_cz_lower(cfg):
    rep = experiments.cz_lower(_int_list(cfg["sizes"]), cfg["lambda_rule"], _estimator(cfg))
    _emit(cfg, rep, "json")


def cmd_szego(cfg):
    rep = experiments.szego(parse_lattice(cfg["symbol"]), _exp_list(cfg["p"]), _int_list(cfg["sizes"]))
    _emit(cfg, rep, "csv")


def cmd_transfer_check(cfg):
    rep = experiments.transfer_check(cfg["group"], int(cfg["n"]), cfg["symbol"], _exp_list(cfg["p"]),
                                     parse_exponent(str(cfg["p_out"])), _estimator(cfg),
                                     batch=int(cfg["batch"]))
    _emit(cfg, rep, "json")
    if rep["violations"] or rep["max_lift_gap"] >= 1e-9:
        raise NumericalCheckError(f"{rep['violations']} violations, max lift gap {rep['max_lift_gap']}")


def cmd_apply(cfg):
    if not cfg.get("symbol"):
        raise InputError("apply needs --symbol")
    if not cfg.get("out"):
        raise InputError("apply needs --out")
    try:
        phi = SymbolTensor.from_dict(json.loads(Path(cfg["symbol"]).read_text()))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise FormatError(f"bad symbol file: {exc}") from exc
    mats = [read_matrix(p) for p in cfg.get("inputs") or []]
    if cfg["mode"] == "schur":
        result = schur_apply(phi, *mats)
    else:
        if not cfg.get("group"):
            raise InputError("fourier mode needs --group")
        G = parse_group(cfg["group"])
        fs = [lambda_coefficients(G, m) for m in mats]
        result = lambda_matrix(G, fourier_coefficients(phi, G, *fs))
    write_matrix(cfg["out"], np.asarray(result))


COMMANDS = {
    "trunc-growth": cmd_trunc_growth,
    "bht-lower": cmd_bht_lower,
    "cz-lower": cmd_cz_lower,
    "szego": cmd_szego,
    "transfer-check": cmd_transfer_check,
    "apply": cmd_apply,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        COMMANDS[args.command](cfg)
    except NumericalCheckError as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
