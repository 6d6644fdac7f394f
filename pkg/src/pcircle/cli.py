"""Command-line interface: ``pcircle {eval,identity,sweep,scan,hardy}``.

Exit codes: 0 success, 2 invalid input, 3 non-convergence or budget
exceeded, 4 an identity check failed.  Output goes to stdout unless
``--output`` is given; reports are JSON objects or CSV with a header row.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, genbessel, identity, lattice
from .config import DEFAULTS
from .errors import DomainError, InsufficientData, NonConvergence, ResourceError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_FAILED = 4

SWEEP_FIELDS = ("p", "r", "count", "area", "error")


class UsageError(Exception):
    pass


def fmt(v):
    """Shortest decimal that round-trips the double exactly."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _plain(obj):
    # numpy scalars and tuples into JSON-native types
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    return obj


def to_json(obj):
    return json.dumps(_plain(obj), ensure_ascii=False) + "\n"


def to_csv(fields, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([fmt(row[f]) for f in fields])
    return buf.getvalue()


def emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# argument parsing helpers


def pair(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return (a, b)


def float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def r_grid(text):
    """``start:stop:count``."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    if not (0 < a < b) or n < 2:
        raise argparse.ArgumentTypeError("r grid needs 0 < start < stop and count >= 2")
    return (a, b, n)


def threads(text):
    if text == "auto":
        return os.cpu_count() or 1
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threads must be a positive integer or 'auto', got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be at least 1")
    return n


def positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.target} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# commands


def cmd_eval(args):
    t0 = time.perf_counter()
    target = args.target
    tol = args.tol
    rec = {"target": target}
    if target == "j0p":
        _require(args, "p", "eta")
        rec.update(p=args.p, eta=list(args.eta))
        fn = genbessel.j0p_series if args.method == "series" else genbessel.j0p_quad
        res = fn(args.p, args.eta, tol=tol) if args.method != "series" else fn(args.p, args.eta)
    elif target == "jomega":
        _require(args, "p", "omega", "eta")
        rec.update(p=args.p, omega=args.omega, eta=list(args.eta))
        if args.method == "series":
            res = genbessel.jomega_series(args.p, args.omega, args.eta)
        else:
            res = genbessel.jomega_quad(args.p, args.omega, args.eta, tol=tol)
    elif target == "kratzel":
        _require(args, "p", "nu", "r")
        rec.update(p=args.p, nu=args.nu, r=args.r)
        res = genbessel.kratzel_j(args.p, args.nu, args.r, tol=tol)
    elif target == "d_sum":
        _require(args, "p", "beta", "s", "x")
        rec.update(p=args.p, beta=args.beta, s=args.s, x=list(args.x))
        out = lattice.d_sum(args.p, args.beta, args.s, args.x)
        res = genbessel.EvalResult(out.value.real, 0.0, "enumeration")
        rec["imag"] = out.value.imag
        rec["points"] = out.points
    elif target == "d_cal":
        _require(args, "p", "beta", "s", "x")
        rec.update(p=args.p, beta=args.beta, s=args.s, x=list(args.x))
        if args.method == "quad":
            q = lattice.d_cal_quad(args.p, args.beta, args.s, args.x, tol=tol)
            res = genbessel.EvalResult(q.value, q.error_estimate, "quadrature")
        else:
            vals, errs = lattice.d_cal_closed_many(args.p, args.beta, args.s, [args.x])
            res = genbessel.EvalResult(float(vals[0]), float(errs[0]), "closed-form")
    else:  # argparse restricts the choices
        raise UsageError(f"unknown target {target}")
    rec.update(value=res.value, error_estimate=float(res.error_estimate), method=res.method)
    if not args.no_timing:
        rec["wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    if args.format == "csv":
        fields = [k for k in rec]
        row = {k: (";".join(fmt(c) for c in v) if isinstance(v, list) else v) for k, v in rec.items()}
        emit(to_csv(fields, [row]), args.output)
    else:
        emit(to_json(rec), args.output)
    return EXIT_OK


def cmd_identity(args):
    if not identity.in_torus(args.x):
        raise DomainError(f"x = {args.x} must lie in the torus cell (-1/2, 1/2]^2")
    rep = identity.theorem_residual(args.p, args.beta, args.s, args.x, args.cutoff)
    passed = rep.passed()
    out = {"p": args.p, "beta": args.beta, "s": args.s, "x": list(args.x), **rep.as_dict(), "passed": passed}
    if args.format == "csv":
        rows = [{"cutoff": c, "partial_sum": v, "shell_magnitude": m} for (c, v), m in zip(rep.trace, rep.shell_magnitudes)]
        emit(to_csv(("cutoff", "partial_sum", "shell_magnitude"), rows), args.output)
    else:
        emit(to_json(out), args.output)
    return EXIT_OK if passed else EXIT_FAILED


def _radii(grid, linear):
    a, b, n = grid
    return np.linspace(a, b, n) if linear else np.geomspace(a, b, n)


def cmd_sweep(args):
    p = genbessel.PExponent(args.p)
    radii = _radii(args.r, args.linear)
    # validate the budget on the largest radius before any work
    lattice._radius_bound(p.p, float(radii[-1]) ** p.p)
    records = _pmap(lambda r: lattice.error_term(p, r), radii, args.threads)
    rows = [{f: getattr(rec, f) for f in SWEEP_FIELDS} for rec in records]
    fit = analysis.fit_growth_exponent(records) if args.fit else None
    if args.format == "json":
        out = {"records": rows}
        if fit is not None:
            out["fit"] = fit.__dict__
        emit(to_json(out), args.output)
        return EXIT_OK
    text = to_csv(SWEEP_FIELDS, rows)
    if fit is not None:
        text += "# fit " + " ".join(f"{k}={fmt(v)}" for k, v in fit.__dict__.items()) + "\n"
    emit(text, args.output)
    return EXIT_OK


def cmd_scan(args):
    betas = args.betas
    for b in betas:
        if not -1.0 < b <= 6.0:
            raise DomainError(f"beta must lie in (-1, 6], got {b}")
    scans = _pmap(lambda b: analysis.beta_scan(args.p, [b], args.radii), betas, args.threads)
    rows = [row for sc in scans for row in sc.rows]
    slopes = {b: sc.slopes[b] for sc, b in zip(scans, betas)}
    decaying = {b: sc.decaying[b] for sc, b in zip(scans, betas)}
    if args.format == "csv":
        table = [
            {"beta": r.beta, "radius": r.radius, "ring_integral": r.ring_integral, "status": r.status} for r in rows
        ]
        text = to_csv(("beta", "radius", "ring_integral", "status"), table)
        for b in betas:
            text += f"# beta={fmt(b)} slope={fmt(slopes[b])} decaying={fmt(decaying[b])}\n"
        emit(text, args.output)
    else:
        out = {
            "p": args.p,
            "rows": [r.__dict__ for r in rows],
            "summary": [{"beta": b, "slope": slopes[b], "decaying": decaying[b]} for b in betas],
        }
        emit(to_json(out), args.output)
    return EXIT_OK


def cmd_hardy(args):
    rep = identity.hardy_partial(args.r, args.n_max)
    if args.format == "csv":
        rows = [{"n_max": n, "partial_sum": v, "residual": rep.lhs - v} for n, v in rep.trace]
        emit(to_csv(("n_max", "partial_sum", "residual"), rows), args.output)
    else:
        emit(to_json({"r": args.r, **rep.as_dict()}), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--output", default=None, help="write here instead of stdout")
    common.add_argument("--tol", type=positive, default=DEFAULTS.quad_tol, help="quadrature tolerance")
    common.add_argument("--threads", type=threads, default=1, help="worker count or 'auto'")

    parser = argparse.ArgumentParser(prog="pcircle", description="Generalized Bessel functions and p-circle lattice sums.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate one function")
    ev.add_argument("--target", required=True, choices=("j0p", "jomega", "kratzel", "d_sum", "d_cal"))
    ev.add_argument("--p", type=float)
    ev.add_argument("--eta", type=pair)
    ev.add_argument("--omega", type=float)
    ev.add_argument("--nu", type=float)
    ev.add_argument("--r", type=float)
    ev.add_argument("--beta", type=float)
    ev.add_argument("--s", type=float)
    ev.add_argument("--x", type=pair)
    ev.add_argument("--method", choices=("quad", "series", "closed"), default=None)
    ev.add_argument("--no-timing", action="store_true", help="omit wall_time_ms so output is reproducible")
    ev.set_defaults(func=cmd_eval, default_format="json")

    idn = sub.add_parser("identity", parents=[common], help="check the lattice-sum identity")
    idn.add_argument("--p", type=float, default=2.0)
    idn.add_argument("--beta", type=float, default=2.0)
    idn.add_argument("--s", type=float, default=1.5)
    idn.add_argument("--x", type=pair, default=(0.0, 0.0))
    idn.add_argument("--cutoff", type=int, default=40)
    idn.set_defaults(func=cmd_identity, default_format="json")

    sw = sub.add_parser("sweep", parents=[common], help="lattice error term over a radius grid")
    sw.add_argument("--p", type=float, required=True)
    sw.add_argument("--r", type=r_grid, required=True, help="start:stop:count (log-spaced)")
    sw.add_argument("--linear", action="store_true", help="linear instead of log spacing")
    sw.add_argument("--fit", action="store_true", help="append fitted growth exponents")
    sw.set_defaults(func=cmd_sweep, default_format="csv")

    sc = sub.add_parser("scan", parents=[common], help="ring integrals of |Dcal| over beta")
    sc.add_argument("--p", type=float, default=2.0)
    sc.add_argument("--betas", type=float_list, default=[0.0, 0.25, 1.0, 2.0])
    sc.add_argument("--radii", type=float_list, default=[1.0, 2.0, 4.0, 8.0, 16.0])
    sc.set_defaults(func=cmd_scan, default_format="json")

    hd = sub.add_parser("hardy", parents=[common], help="partial sums of the Bessel series for P_2(r)")
    hd.add_argument("--r", type=float, required=True)
    hd.add_argument("--n-max", type=int, default=10**4)
    hd.set_defaults(func=cmd_hardy, default_format="json")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (UsageError, DomainError, InsufficientData) as exc:
        print(f"pcircle: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NonConvergence, ResourceError) as exc:
        print(f"pcircle: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OverflowError as exc:
        print(f"pcircle: overflow: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
