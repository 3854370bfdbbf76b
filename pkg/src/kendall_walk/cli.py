"""Command-line interface.

Exit codes: 0 success, 1 numeric or validation failure, 2 usage error
(bad flags, unknown family, unordered fdd inputs, oversized enumeration).
Every output carries the seed, which defaults to 0.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import asymptotics as A
from .distributions import DistributionError, load_distribution, make_family
from .fdd import FddError, FddQuery, fdd_cdf_dp_result, fdd_cdf_enum_result
from .kernel import KernelQuery, kernel_cdf, kernel_trunc_moment
from .simulator import SimConfig, sample_ensemble
from .validation import SUITES, validate_suite
from .williamson import cdf_n, tail_n


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return [int(v) for v in vals]


def _dist_flags(p):
    g = p.add_argument_group("step distribution")
    g.add_argument("--dist", help="family: dirac, pareto_mix, lack_of_memory, stable, uniform, gamma, generic")
    g.add_argument("--alpha", type=float, help="Kendall index alpha > 0")
    g.add_argument("--p", type=float, help="pareto_mix weight / index")
    g.add_argument("--m", type=float, help="stable alpha-moment")
    g.add_argument("--a", type=float, help="gamma shape")
    g.add_argument("--b", type=float, help="gamma rate")
    g.add_argument("--dist-file", help="JSON distribution spec")
    g.add_argument("--cdf-file", help="two-column x,F(x) CSV for a generic law")
    g.add_argument("--quad-tol", type=float, default=1e-10)


def _out_flags(p, csv_default=False):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="emit JSON")
    g.add_argument("--csv", action="store_true", default=csv_default, help="emit CSV")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="kendall-walk", description="Kendall random walks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="simulate walk paths")
    _dist_flags(p)
    p.add_argument("--n", type=int, required=True, help="horizon")
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--record", type=_ints, default=None, help="extra epochs to keep")
    p.add_argument("--full", action="store_true", help="write every path in full")
    _out_flags(p, csv_default=True)

    p = sub.add_parser("cdf", help="exact cdf of X_n")
    _dist_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=_floats, required=True)
    _out_flags(p)

    p = sub.add_parser("fdd", help="exact joint cdf at several epochs")
    _dist_flags(p)
    p.add_argument("--epochs", type=_ints, required=True)
    p.add_argument("--thresholds", type=_floats, required=True)
    p.add_argument("--method", choices=("enum", "dp"), default="enum")
    _out_flags(p)

    p = sub.add_parser("kernel", help="transition kernel cdf and truncated moment")
    _dist_flags(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=_floats, required=True)
    _out_flags(p)

    p = sub.add_parser("tail", help="exact tail of X_n against its two-term expansion")
    _dist_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=_floats, required=True)
    _out_flags(p)

    p = sub.add_parser("limit", help="stable limit law cdf and pdf")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, default=None, help="finite-moment law parameter")
    p.add_argument("--theta", type=float, default=None, help="regularly varying law parameter")
    p.add_argument("--include-tail", action="store_true",
                   help="regularly varying law including the step tail (the walk's actual limit)")
    p.add_argument("--x", type=_floats, required=True)
    _out_flags(p)

    p = sub.add_parser("norming", help="norming constants and convergence diagnostics")
    _dist_flags(p)
    p.add_argument("--n", type=_ints, required=True)
    p.add_argument("--method", choices=("auto", "closed_form", "numeric"), default="auto")
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--diagnostic", action="store_true",
                   help="also report sup-distance to the matching limit law")
    _out_flags(p)

    p = sub.add_parser("validate", help="run a self-validation suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--quick", action="store_true", help="reduced Monte Carlo size")
    p.add_argument("--mc-samples", type=int, default=None)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _distribution(args):
    if args.dist_file:
        return load_distribution(args.dist_file)
    if args.cdf_file:
        if args.alpha is None:
            raise UsageError("--alpha is required")
        return make_family({"family": "generic", "csv": args.cdf_file,
                            "quad_tol": args.quad_tol}, args.alpha)
    if not args.dist or args.alpha is None:
        raise UsageError("--dist and --alpha are required (or --dist-file / --cdf-file)")
    params = {k: getattr(args, k) for k in ("p", "m", "a", "b") if getattr(args, k) is not None}
    return make_family(args.dist, args.alpha, **params)


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def _emit(args, header, rows, meta):
    """Write rows as a table, CSV or JSON (``meta`` always includes the seed)."""
    if getattr(args, "json", False):
        body = dict(meta)
        body["results"] = [dict(zip(header, (float(v) if isinstance(v, (float, np.floating))
                                             else v for v in r))) for r in rows]
        text = json.dumps(body, sort_keys=True) + "\n"
    elif getattr(args, "csv", False):
        text = "# " + json.dumps(meta, sort_keys=True) + "\n" + ",".join(header) + "\n"
        text += "".join(",".join(_fmt(v) for v in r) + "\n" for r in rows)
    else:
        cells = [header] + [[_fmt(v) for v in r] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
        lines = ["# " + " ".join(f"{k}={_meta_str(v)}" for k, v in meta.items())]
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
        text = "\n".join(lines) + "\n"
    _write(args, text)


def _meta_str(v):
    return json.dumps(v, sort_keys=True, separators=(",", ":")) if isinstance(v, dict) else str(v)


def _write(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_sample(args):
    d = _distribution(args)
    cfg = SimConfig(d, horizon=args.n, paths=args.paths, seed=args.seed, streams=args.streams,
                    record=tuple(args.record or ()), keep_paths=args.full)
    e = sample_ensemble(cfg, workers=args.workers)
    if args.json:
        body = {"config": cfg.echo(), "seed": args.seed, "epochs": list(e.epochs),
                "values": e.values.tolist()}
        _write(args, json.dumps(body, sort_keys=True) + "\n")
    else:
        _write(args, e.to_csv(full=args.full or bool(args.record)))
    return 0


def _cmd_cdf(args):
    d = _distribution(args)
    rows = [(t, float(cdf_n(d, args.n, t))) for t in args.t]
    _emit(args, ["t", "cdf"], rows, {"dist": d.to_dict(), "n": args.n, "seed": args.seed})
    return 0


def _cmd_fdd(args):
    d = _distribution(args)
    q = FddQuery(tuple(args.epochs), tuple(args.thresholds))
    res = fdd_cdf_enum_result(d, q) if args.method == "enum" else fdd_cdf_dp_result(d, q)
    meta = {"dist": d.to_dict(), "epochs": list(q.epochs), "thresholds": list(q.thresholds),
            "method": args.method, "seed": args.seed}
    if args.json:
        body = {"value": res.value, "k": res.k, "terms_evaluated": res.terms_evaluated}
        body.update(meta)
        _write(args, json.dumps(body, sort_keys=True) + "\n")
    else:
        _emit(args, ["value", "k", "terms_evaluated"], [(res.value, res.k, res.terms_evaluated)], meta)
    return 0


def _cmd_kernel(args):
    d = _distribution(args)
    rows = []
    for t in args.t:
        KernelQuery(args.x, args.n, t)
        rows.append((t, float(kernel_cdf(d, args.x, args.n, t)),
                     float(kernel_trunc_moment(d, args.x, args.n, t))))
    _emit(args, ["t", "cdf", "trunc_moment"], rows,
          {"dist": d.to_dict(), "x": args.x, "n": args.n, "seed": args.seed})
    return 0


def _cmd_tail(args):
    d = _distribution(args)
    regime = A.corollary_regime(d)
    rows = []
    for t in args.t:
        exact = float(tail_n(d, args.n, t))
        approx = float(A.tail_expansion(d, args.n, t))
        rows.append((t, exact, approx, exact / approx if approx > 0 else math.nan))
    _emit(args, ["t", "tail", "expansion", "ratio"], rows,
          {"dist": d.to_dict(), "n": args.n, "regime": regime.name, "seed": args.seed})
    return 0


def _cmd_limit(args):
    if args.theta is not None and args.m is not None:
        raise UsageError("give either --m or --theta, not both")
    if args.theta is not None:
        law = (A.RegVarWalk if args.include_tail else A.RegVar)(args.theta, args.alpha)
    else:
        law = A.FiniteMoment(1.0 if args.m is None else args.m, args.alpha)
    rows = [(x, float(A.limit_cdf(law, x)), float(A.limit_pdf(law, x))) for x in args.x]
    _emit(args, ["x", "cdf", "pdf"], rows, {"law": law.to_dict(), "seed": args.seed})
    return 0


def _cmd_norming(args):
    d = _distribution(args)
    meta = {"dist": d.to_dict(), "method": args.method, "seed": args.seed}
    if args.diagnostic:
        law = A.default_law(d)
        if args.method == "numeric" or (args.method == "auto" and not math.isfinite(d.alpha_moment)):
            law = A.FiniteMoment(1.0, d.alpha) if law.kind == "finite_moment" else law
        tab = A.convergence_diagnostic(d, args.n, law=law, method=args.method)
        rows = list(zip(tab.n, tab.a_n, tab.sup_distance))
        meta["law"] = law.to_dict()
        _emit(args, ["n", "a_n", "sup_distance"], rows, meta)
        return 0
    rows = []
    for n in args.n:
        if args.method == "closed_form" or (args.method == "auto" and math.isfinite(d.alpha_moment)):
            a = A.norming_sequence(d, n, method="closed_form")
        else:
            a = A.norming_sequence(d, n, method="numeric", x_min=args.x_min)
        rows.append((n, a, A.norming_residual(d, n, a)))
    _emit(args, ["n", "a_n", "residual"], rows, meta)
    return 0


def _cmd_validate(args):
    report = validate_suite(args.suite, seed=args.seed, quick=args.quick,
                            mc_samples=args.mc_samples)
    _write(args, report.to_json())
    return 0 if report.passed else 1


COMMANDS = {"sample": _cmd_sample, "cdf": _cmd_cdf, "fdd": _cmd_fdd, "kernel": _cmd_kernel,
            "tail": _cmd_tail, "limit": _cmd_limit, "norming": _cmd_norming,
            "validate": _cmd_validate}


def run_command(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DistributionError, FddError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command())
