"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numeric failure, 4 a check
reported ``violated``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import experiments, solve, wentzell
from .domain import describe, parse_domain
from .spectrum import SolverError, UndersuppliedComponent

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VIOLATED = 0, 2, 3, 4

SPECTRUM_COLUMNS = ["index", "value", "multiplicity", "component", "mode", "solver", "err"]
REPORT_COLUMNS = ["case", "domain", "param", "k", "lhs", "rhs", "lhs_err", "rhs_err", "margin", "tol",
                  "verdict", "note"]


class InputError(ValueError):
    pass


def _num(x):
    # repr round-trips floats and is stable across runs
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _csv_text(header, rows, trailer=()):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    for line in trailer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _domain(text):
    if text is None:
        raise InputError("--domain is required")
    return parse_domain(text)


def cmd_spectrum(args):
    dom = _domain(args.domain)
    if args.condition == "dirichlet":
        spec = solve.dirichlet_spectrum(dom, args.k, solver=args.solver, refine=args.refine, tol=args.tol)
        alpha = math.inf
    else:
        alpha = 0.0 if args.condition == "neumann" else args.alpha
        spec = solve.robin_spectrum(dom, alpha, args.k, p=args.p, solver=args.solver,
                                    refine=args.refine, tol=args.tol)
    if args.format == "json":
        _emit(args, _json_text({
            "domain": describe(dom), "condition": args.condition, "alpha": alpha, "p": args.p, "k": args.k,
            "entries": [dict(zip(SPECTRUM_COLUMNS, _row(i, e))) for i, e in enumerate(spec.entries, 1)],
        }))
    else:
        _emit(args, _csv_text(SPECTRUM_COLUMNS, [_row(i, e) for i, e in enumerate(spec.entries, 1)]))
    if args.figure:
        from .plotting import plot_spectrum
        plot_spectrum(spec, args.figure, f"{describe(dom)}  {args.condition} alpha={alpha:g}")
    return EXIT_OK


def _row(i, e):
    return [i, e.value, e.multiplicity, e.component, e.mode, e.solver, e.err]


def _alpha_grid(args):
    if args.alpha_min is None or args.alpha_max is None:
        raise InputError("an alpha sweep needs --alpha-min and --alpha-max")
    if args.steps < 1:
        raise InputError("--steps must be positive")
    if args.log:
        if args.alpha_min <= 0:
            raise InputError("--log needs --alpha-min > 0")
        return np.geomspace(args.alpha_min, args.alpha_max, args.steps)
    return np.linspace(args.alpha_min, args.alpha_max, args.steps)


def cmd_sweep(args):
    if args.ball_dim is not None:
        if args.volume_min is None or args.volume_max is None or args.volume_min <= 0:
            raise InputError("a volume sweep needs 0 < --volume-min and --volume-max")
        vols = np.linspace(args.volume_min, args.volume_max, args.steps)
        sw = experiments.sweep_volume(args.ball_dim, vols, args.alpha, args.k, args.p, args.solver)
        title = f"balls N={args.ball_dim}, alpha={args.alpha:g}"
    else:
        dom = _domain(args.domain)
        sw = experiments.sweep_alpha(dom, args.k, _alpha_grid(args), args.p, args.solver, args.refine)
        title = describe(dom)
    header = ["param"] + [f"lambda_{j + 1}" for j in range(args.k)]
    verdicts = ",".join(f"{name}={'yes' if ok else 'NO'}" for name, ok in sw.monotone.items())
    if args.format == "json":
        _emit(args, _json_text({
            "param": sw.param_name, "grid": sw.params, "values": sw.values.tolist(),
            "errors": sw.errors.tolist(), "monotone": sw.direction, "verdicts": sw.monotone}))
    else:
        rows = [[x] + list(v) for x, v in zip(sw.params, sw.values)]
        _emit(args, _csv_text(header, rows, [f"{sw.param_name} sweep {sw.direction}: {verdicts}"]))
    if args.figure:
        from .plotting import plot_sweep
        plot_sweep(sw, args.figure, title, log_x=bool(args.log) and args.ball_dim is None)
    return EXIT_OK


def cmd_wentzell(args):
    dom = _domain(args.domain)
    prov = wentzell.auto_provider(dom, args.k, args.beta, args.gamma, args.refine)
    points = wentzell.wentzell_fixed_points(prov, args.beta, args.gamma, args.k)
    header = ["index", "Lambda", "alpha", "residual", "err", "solver"]
    rows = [[fp.n, fp.Lambda, fp.alpha, fp.residual, fp.err, prov.name] for fp in points]
    if args.format == "json":
        _emit(args, _json_text({
            "domain": describe(dom), "beta": args.beta, "gamma": args.gamma,
            "points": [dict(zip(header, r)) for r in rows]}))
    else:
        _emit(args, _csv_text(header, rows))
    if args.figure:
        from .plotting import plot_wentzell
        plot_wentzell(points, args.gamma, args.figure, describe(dom))
    return EXIT_OK


def _emit_report(args, report):
    if args.format == "json":
        _emit(args, _json_text(report.to_dict()))
    else:
        rows = [[i, c.domain, c.param, c.k, c.lhs, c.rhs, c.lhs_err, c.rhs_err, c.margin, c.tol,
                 c.verdict, c.note] for i, c in enumerate(report.cases, 1)]
        trailer = [f"verdict={report.verdict}", f"reason={report.reason}"]
        trailer += [f"{k}={v}" for k, v in report.extra.items()]
        _emit(args, _csv_text(REPORT_COLUMNS, rows, trailer))
    if args.figure:
        from .plotting import plot_report
        plot_report(report, args.figure)
    return EXIT_VIOLATED if report.verdict == experiments.VIOLATED else EXIT_OK


def _alphas(args):
    return args.alpha if isinstance(args.alpha, list) else [args.alpha]


def cmd_faber_krahn(args):
    rep = experiments.check_faber_krahn(_domain(args.domain), _alphas(args), args.p, args.solver,
                                        args.refine, not args.no_stability)
    return _emit_report(args, rep)


def cmd_two_balls(args):
    rep = experiments.check_two_balls(_domain(args.domain), _alphas(args), args.p, args.solver,
                                      args.refine, not args.no_stability)
    return _emit_report(args, rep)


def cmd_crossover(args):
    rep = experiments.crossover(_domain(args.domain), args.k, args.alpha_min, args.alpha_max, args.steps,
                                args.solver, args.refine)
    return _emit_report(args, rep)


def cmd_wentzell_check(args):
    if args.U is None or args.V is None:
        raise InputError("wentzell-check needs --U and --V")
    rep = experiments.wentzell_check(parse_domain(args.U), parse_domain(args.V), args.beta, args.gamma,
                                     args.k, args.refine)
    return _emit_report(args, rep)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p, alpha_multi=False, alpha_default=1.0):
    p.add_argument("--domain", help="domain DSL, e.g. disk:R=1 or dk:M=1,k=2,N=2")
    if alpha_multi:
        p.add_argument("--alpha", type=float, nargs="+", default=[alpha_default], help="Robin parameter(s)")
    else:
        p.add_argument("--alpha", type=float, default=alpha_default, help="Robin parameter")
    p.add_argument("--p", type=float, default=2.0, help="p-Laplacian exponent")
    p.add_argument("--k", type=int, default=1, help="number of eigenvalues / index")
    p.add_argument("--solver", choices=solve.SOLVERS, default="auto")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--refine", type=int, default=1, help="FEM refinement level (>= 1)")
    p.add_argument("--tol", type=float, default=1e-8, help="eigensolver residual tolerance")
    p.add_argument("--figure", help="also render a PNG/PDF figure to this path")


def build_parser():
    parser = argparse.ArgumentParser(prog="robinspec", description="Robin / Wentzell Laplacian eigenvalue lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="first k eigenvalues of a domain")
    _common(p, alpha_default=0.0)
    p.add_argument("--condition", choices=("robin", "neumann", "dirichlet"), default="robin")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="eigencurves over an alpha grid or a ball volume grid")
    _common(p)
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--log", action="store_true", help="logarithmic alpha grid")
    p.add_argument("--ball-dim", type=int, help="sweep ball volumes in this dimension instead")
    p.add_argument("--volume-min", type=float)
    p.add_argument("--volume-max", type=float)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("wentzell", help="Wentzell eigenvalues via Robin eigencurve fixed points")
    _common(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=cmd_wentzell)

    p = sub.add_parser("wentzell-check", help="transfer of a Robin inequality to Wentzell eigenvalues")
    _common(p)
    p.add_argument("--U")
    p.add_argument("--V")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=cmd_wentzell_check)

    for name, func, hlp in (("check-faber-krahn", cmd_faber_krahn, "lambda_1 against the equal-volume ball"),
                            ("check-two-balls", cmd_two_balls, "lambda_2 against two equal balls")):
        p = sub.add_parser(name, help=hlp)
        _common(p, alpha_multi=True)
        p.add_argument("--no-stability", action="store_true",
                       help="skip the extra-refinement rerun of FEM verdicts")
        p.set_defaults(func=func)

    p = sub.add_parser("crossover", help="alpha where lambda_k(domain) - lambda_k(D_k) changes sign")
    _common(p)
    p.add_argument("--alpha-min", type=float, default=1e-2)
    p.add_argument("--alpha-max", type=float, default=1e3)
    p.add_argument("--steps", type=int, default=11)
    p.set_defaults(func=cmd_crossover)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.k < 1:
        parser.error("--k must be at least 1")
    if args.refine < 0:
        parser.error("--refine must be non-negative")
    try:
        return args.func(args)
    except UndersuppliedComponent as exc:
        # k beyond what the solvers can certify for this domain
        print(f"robinspec: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        # LinAlgError derives from ValueError, so it must be caught first
        print(f"robinspec: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"robinspec: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
