"""``ncmoments`` command line entry point.

Exit codes: 0 on success, 1 when a reported check fails (bound violated,
example mismatch, ...), 2 on usage errors and unreadable or invalid input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import harness
from .dilations import halmos_dilation, normal_doubling, unitary_mean
from .geometry import chebyshev_radius, spread
from .linalg import (DEFAULT_TOL, ConvergenceError, Density, MatrixError,
                     ToleranceConfig, adjoint)
from .matrixio import (MatrixParseError, complex_to_dict, dumps, matrix_to_dict,
                       read_matrix, to_csv)
from .moments import bernoulli_b, central_moment, moment_report
from .pinching import Partition, pinching_contractivity_check
from .states import ReductionError, mu_p, reduce_to_projection

CONFIG_ENV = "NCMOMENTS_CONFIG"
_CONFIG_KEYS = {"tolerances", "seed", "format", "output"}
LEMMA1_RANGE = (1.0 - 1e-3, 1.0 + 1e-9)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GlobalConfig:
    tol: ToleranceConfig = DEFAULT_TOL
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"


def load_config(args) -> GlobalConfig:
    """Defaults, then the config file (``--config`` or ``$NCMOMENTS_CONFIG``), then flags."""
    doc = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError(f"config {path} must hold a JSON object")
        unknown = sorted(set(doc) - _CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    overrides = dict(doc.get("tolerances", {}))
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        overrides[name] = value
    try:
        tol = DEFAULT_TOL.with_overrides(overrides)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except ValueError as exc:
        raise UsageError(f"bad tolerance value: {exc}") from None
    fmt = args.format or doc.get("format", "json")
    if fmt not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {fmt!r}")
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    output = args.out if args.out is not None else doc.get("output")
    return GlobalConfig(tol, seed, None if output in ("", "-") else output, fmt)


def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _density(path, n, tol):
    if path is None:
        return Density.maximally_mixed(n)
    D = Density.from_matrix(read_matrix(path), tol)
    if D.n != n:
        raise MatrixError(f"density is {D.n}x{D.n} but the matrix is {n}x{n}")
    return D


# -- commands: each returns (payload, ok, csv_rows, csv_columns) -----------------

def cmd_moment(args, cfg):
    A = read_matrix(args.matrix)
    D = _density(args.density, A.shape[0], cfg.tol)
    if args.bounds:
        rows = moment_report(D, A, args.p)
        ok = all(r.get("bound_root_le_radius", True) and r.get("bound_fourth_holds", True)
                 for r in rows)
        return rows, ok, rows, None
    vals = [central_moment(D, A, p, cfg.tol).to_dict() for p in args.p]
    return (vals[0] if len(vals) == 1 else vals), True, vals, None


def cmd_mu(args, cfg):
    A = read_matrix(args.matrix)
    res = [mu_p(A, p, restarts=args.restarts, seed=cfg.seed).to_dict() for p in args.p]
    return (res[0] if len(res) == 1 else res), True, res, None


def cmd_reduce(args, cfg):
    A = read_matrix(args.matrix)
    D = _density(args.density, A.shape[0], cfg.tol)
    red = reduce_to_projection(D, A, args.p, cfg.tol)
    out = red.to_dict()
    ok = bool(np.max(np.abs(red.constraint_residuals)) <= cfg.tol.feasibility)
    return out, ok, [out], None


def cmd_chebyshev(args, cfg):
    res = chebyshev_radius(read_matrix(args.matrix))
    out = {"lambda_star": complex_to_dict(res.lambda_star), "radius": res.radius,
           "evaluations": res.evaluations}
    return out, True, [out], None


def cmd_spread(args, cfg):
    res = spread(read_matrix(args.matrix))
    out = {"value": res.value, "witness": [complex_to_dict(z) for z in res.witness]}
    return out, True, [out], None


def cmd_dilate(args, cfg):
    A = read_matrix(args.matrix)
    if args.kind == "halmos":
        pair = halmos_dilation(A, normalize=args.normalize, tol=cfg.tol)
        out = {"kind": "halmos", "scale": pair.extras["scale"],
               "partial_isometry_residual": pair.extras["residual"],
               "dilated": matrix_to_dict(pair.dilated)}
        ok = pair.extras["residual"] <= cfg.tol.partial_isometry
    elif args.kind == "unitary-mean":
        U1, U2 = unitary_mean(A, normalize=args.normalize, tol=cfg.tol)
        n = A.shape[0]
        nrm = float(np.linalg.norm(A, 2))
        scale = nrm if args.normalize and nrm > 1.0 + cfg.tol.contraction else 1.0
        unit = max(float(np.max(np.abs(adjoint(U) @ U - np.eye(n)))) for U in (U1, U2))
        mean = float(np.max(np.abs(0.5 * (U1 + U2) - A / scale)))
        out = {"kind": "unitary-mean", "scale": scale, "unitarity_residual": unit,
               "mean_residual": mean, "U1": matrix_to_dict(U1), "U2": matrix_to_dict(U2)}
        ok = unit <= 1e-8 and mean <= 1e-8
    else:
        d = normal_doubling(A, center=args.center, tol=cfg.tol)
        ra = chebyshev_radius(d.a_tilde).radius
        rh = chebyshev_radius(d.h_tilde).radius
        out = {"kind": "doubling", "center": complex_to_dict(d.center),
               "radius_a_tilde": ra, "radius_h_tilde": rh,
               "eigenvalues": [complex_to_dict(z) for z in d.eigenvalues],
               "a_tilde": matrix_to_dict(d.a_tilde), "h_tilde": matrix_to_dict(d.h_tilde),
               "transition": matrix_to_dict(d.transition)}
        ok = True
    return out, ok, [out], None


def cmd_pinch(args, cfg):
    A = read_matrix(args.matrix)
    part = Partition.parse(args.blocks, A.shape[0])
    rows = []
    for p in args.p:
        lhs, rhs, holds = pinching_contractivity_check(A, part, p)
        rows.append({"p": p, "lhs": lhs, "rhs": rhs, "holds": holds})
    ok = all(r["holds"] for r in rows)
    return (rows[0] if len(rows) == 1 else rows), ok, rows, None


def cmd_bernoulli(args, cfg):
    rows = []
    for p in args.p:
        b = bernoulli_b(p)
        rows.append({"p": b.p, "b_p": b.b_p, "argmax_t": b.argmax_t, "root": b.root})
    return (rows[0] if len(rows) == 1 else rows), True, rows, None


def cmd_lemma1(args, cfg):
    res = harness.lemma1_bruteforce(args.resolution)
    lo, hi = LEMMA1_RANGE
    ok = lo <= res.max_value <= hi
    out = {"max_value": res.max_value, "argmax": list(res.argmax),
           "grid_value": res.grid_value, "resolution": res.resolution,
           "expected_range": [lo, hi], "in_range": ok}
    return out, ok, [out], None


def cmd_verify(args, cfg):
    ids = harness.SUITES if args.suite == "all" else tuple(args.suite.split(","))
    bad = [i for i in ids if i not in harness.SUITES]
    if bad:
        raise UsageError(f"unknown suite(s) {', '.join(bad)}; choose from all, "
                         + ", ".join(harness.SUITES))
    reports = harness.verify_suite(ids, args.trials, args.dim, args.p, cfg.seed)
    rows = harness.report_dicts(reports, timing=args.timing)
    ok = all(r["violations"] == 0 for r in rows)
    return rows, ok, rows, list(harness.VerificationReport.FIELDS)


def cmd_examples(args, cfg):
    rep = harness.run_examples(restarts=args.restarts, seed=cfg.seed)
    out = rep.to_dict()
    return out, rep.passed, out["checks"], None


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", help="write output here instead of stdout (- for stdout)")
    common.add_argument("--seed", type=int, help="seed for every randomised step")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override one tolerance (repeatable)")

    ap = argparse.ArgumentParser(prog="ncmoments", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("moment", cmd_moment, "central moment Tr[D|A - Tr DA|^p]")
    p.add_argument("--matrix", required=True)
    p.add_argument("--density", help="density matrix file (default: I/n)")
    p.add_argument("--p", type=_floats, required=True)
    p.add_argument("--bounds", action="store_true",
                   help="also compare with the Chebyshev-radius bounds")

    p = add("mu", cmd_mu, "largest p-th central moment over all states")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=_floats, required=True)
    p.add_argument("--restarts", type=int, default=64)

    p = add("reduce", cmd_reduce, "rank-one projection with the same constraint data")
    p.add_argument("--matrix", required=True)
    p.add_argument("--density")
    p.add_argument("--p", type=float, required=True)

    p = add("chebyshev", cmd_chebyshev, "min over lambda of ||A - lambda I||")
    p.add_argument("--matrix", required=True)

    p = add("spread", cmd_spread, "largest distance between two eigenvalues")
    p.add_argument("--matrix", required=True)

    p = add("dilate", cmd_dilate, "Halmos dilation, unitary mean or normal doubling")
    p.add_argument("--matrix", required=True)
    p.add_argument("--kind", choices=("halmos", "unitary-mean", "doubling"), required=True)
    p.add_argument("--normalize", action="store_true",
                   help="divide a non-contraction by its norm first")
    p.add_argument("--center", action="store_true",
                   help="doubling: centre the spectrum at its enclosing circle")

    p = add("pinch", cmd_pinch, "Schatten contractivity of a block pinching")
    p.add_argument("--matrix", required=True)
    p.add_argument("--blocks", required=True, help='1-based blocks, e.g. "1,2|3,4"')
    p.add_argument("--p", type=_floats, required=True)

    p = add("bernoulli", cmd_bernoulli, "b_p = max_t t^p(1-t) + t(1-t)^p")
    p.add_argument("--p", type=_floats, required=True)

    p = add("lemma1", cmd_lemma1, "grid search of the four-variable lemma")
    p.add_argument("--resolution", type=int, default=200)

    p = add("verify", cmd_verify, "randomised inequality suites")
    p.add_argument("--suite", default="all",
                   help="all or comma list of " + ",".join(harness.SUITES))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dim", type=_ints, default=[2, 4, 8])
    p.add_argument("--p", type=_floats, default=[1.0, 2.0, 4.0])
    p.add_argument("--timing", action="store_true",
                   help="record elapsed_s (reports are then no longer reproducible)")

    p = add("examples", cmd_examples, "reproduce the worked examples")
    p.add_argument("--restarts", type=int, default=64)
    return ap


def _emit(text: str, cfg: GlobalConfig):
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args)
        payload, ok, rows, columns = args.func(args, cfg)
        text = dumps(payload) if cfg.format == "json" else to_csv(rows, columns)
        _emit(text, cfg)
    except (UsageError, MatrixParseError, MatrixError, OSError) as exc:
        print(f"ncmoments {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ReductionError, ConvergenceError, ArithmeticError) as exc:
        print(f"ncmoments {args.command}: failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"ncmoments {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
