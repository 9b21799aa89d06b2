"""Command-line interface.

Commands: check-law (BB-graph and cyclic-monotonicity screens), reconstruct
(max-affine potential from cyclically monotone samples), build (CSV probe
table of an infimum bipotential), verify (axiom, coverage, and BIC reports),
demo (named end-to-end scenarios). Reports are JSON on standard output with
sorted keys; diagnostics go to standard error. Exit codes: 0 success, 1
parse or usage error, 2 a mathematical check failed, 3 analytic mode on a
tabulated cover.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bipotentials import (
    AnalyticFormUnavailableError,
    BInfinityBipotential,
    bic_check,
    build_inf,
    default_probe_plan,
    embed_dual,
    embed_primal,
    verify_axioms,
)
from .covers import ClosedInterval, Cover, TabulatedFamily, coverage_check
from .demos import DEMO_NAMES, demo_setup, run_demo
from .formats import (
    FormatError,
    csv_header,
    dumps,
    load_cover,
    load_law,
    probe_rows,
    to_jsonable,
)
from .laws import NotCyclicallyMonotoneError, bb_check, cyclic_monotonicity_check
from .laws import rockafellar_reconstruct


class CLIError(Exception):
    """Usage or input error; reported on standard error with exit code 1."""


def _parse_grid_spec(spec, what):
    parts = spec.split(":")
    if len(parts) != 3:
        raise CLIError(f"{what} must be lo:hi:count, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CLIError(f"{what} must be lo:hi:count with numeric parts, got {spec!r}")
    if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
        raise CLIError(f"{what} needs finite lo <= hi, got {spec!r}")
    if count < 2:
        raise CLIError(f"{what} needs at least 2 points, got {count}")
    return np.linspace(lo, hi, count)


def _probe_stacks(dim, spec):
    g = _parse_grid_spec(spec, "--probe-grid")
    xs = np.array([embed_primal(s, dim) for s in g])
    ys = np.array([embed_dual(t, dim) for t in g])
    return xs, ys


def _apply_lambda_grid(cover, spec):
    if spec is None:
        return cover
    if not isinstance(cover.domain, ClosedInterval):
        raise CLIError("--lambda-grid applies only to interval parameter domains")
    g = _parse_grid_spec(spec, "--lambda-grid")
    dom = cover.domain
    try:
        new_dom = ClosedInterval(dom.lo, dom.hi,
                                 includes_infinity=dom.includes_infinity,
                                 grid_points=g.size,
                                 grid_lo=float(g[0]), grid_hi=float(g[-1]))
    except ValueError as exc:
        raise CLIError(f"--lambda-grid: {exc}") from exc
    return Cover(new_dom, cover.family)


def _load_law(path):
    try:
        return load_law(path)
    except (FormatError, ValueError, OSError) as exc:
        raise CLIError(str(exc)) from exc


def _load_cover(path):
    try:
        return load_cover(path)
    except (FormatError, ValueError, OSError) as exc:
        raise CLIError(str(exc)) from exc


def _emit(data):
    print(dumps(to_jsonable(data)))


# ---------------------------------------------------------------------------
# commands


def cmd_check_law(args):
    law = _load_law(args.law)
    bb = bb_check(law, tol=args.tol)
    cyc = cyclic_monotonicity_check(law, tol=args.tol)
    _emit({"bb_report": bb, "cycle_report": cyc})
    return 0 if bb.is_bb_graph else 2


def cmd_reconstruct(args):
    law = _load_law(args.law)
    if not 0 <= args.base < len(law):
        raise CLIError(f"--base {args.base} out of range for {len(law)} samples")
    try:
        phi = rockafellar_reconstruct(law, base=args.base, tol=args.tol)
    except NotCyclicallyMonotoneError as exc:
        _emit({"error": "not-cyclically-monotone",
               "witness_cycle": list(exc.report.witness_cycle),
               "cycle_sum": exc.report.cycle_sum})
        print(str(exc), file=sys.stderr)
        return 2
    order = sorted(range(phi.slopes.shape[0]),
                   key=lambda i: (tuple(phi.slopes[i]), float(phi.offsets[i])))
    _emit({
        "form": "max-affine",
        "dimension": law.dim,
        "base_index": args.base,
        "pieces": [{"slope": list(phi.slopes[i]), "offset": float(phi.offsets[i])}
                   for i in order],
    })
    return 0


def cmd_build(args):
    cover = _apply_lambda_grid(_load_cover(args.cover), args.lambda_grid)
    try:
        b = build_inf(cover, mode=args.mode)
    except AnalyticFormUnavailableError as exc:
        print(str(exc), file=sys.stderr)
        return 3
    xs, ys = _probe_stacks(cover.dim, args.probe_grid)
    print(csv_header(cover.dim))
    for line in probe_rows(b, xs, ys):
        print(line)
    return 0


def _verify_cover(cover, law, mode, tol, probe_spec):
    if mode is None:
        mode = "grid" if isinstance(cover.family, TabulatedFamily) else "analytic"
    if tol is None:
        tol = 1e-3 if mode == "grid" else 1e-9
    reports = {}
    ok = True
    if law is not None:
        coverage = coverage_check(cover, law, tol=max(tol, 1e-3))
        reports["coverage"] = coverage
        ok &= coverage.covered
    bic = bic_check(cover, default_probe_plan(cover))
    reports["bic"] = bic
    ok &= bic.is_bic
    b = build_inf(cover, mode=mode)
    xs, ys = _probe_stacks(cover.dim, probe_spec)
    axioms = verify_axioms(b, xs, ys, tol=tol)
    reports["axioms"] = axioms
    ok &= axioms.is_bipotential
    return reports, ok


def _verify_law(law, tol):
    tol = 1e-9 if tol is None else tol
    reports = {}
    bb = bb_check(law, tol=tol)
    reports["bb_report"] = bb
    reports["cycle_report"] = cyclic_monotonicity_check(law, tol=tol)
    ok = bb.is_bb_graph
    if ok:
        b = BInfinityBipotential(law)
        xs = np.array(law.domain())
        ys = np.array(law.image())
        axioms = verify_axioms(b, xs, ys, tol=tol)
        reports["axioms"] = axioms
        ok &= axioms.is_bipotential
    return reports, ok


def cmd_verify(args):
    if args.demo is not None:
        if args.demo not in DEMO_NAMES:
            raise CLIError(f"unknown demo {args.demo!r}; known: {', '.join(DEMO_NAMES)}")
        setup = demo_setup(args.demo)
        reports = {}
        ok = True
        coverage = coverage_check(setup["cover"], setup["law"],
                                  tol=max(setup["tol"], 1e-3))
        reports["coverage"] = coverage
        ok &= coverage.covered
        bic = bic_check(setup["cover"], default_probe_plan(setup["cover"]))
        reports["bic"] = bic
        ok &= bic.is_bic
        b = build_inf(setup["cover"], mode=setup["mode"])
        axioms = verify_axioms(b, setup["x_probes"], setup["y_probes"],
                               tol=setup["tol"])
        reports["axioms"] = axioms
        ok &= axioms.is_bipotential
        _emit(reports)
        return 0 if ok else 2
    if args.cover is not None:
        cover = _apply_lambda_grid(_load_cover(args.cover), args.lambda_grid)
        law = _load_law(args.law) if args.law is not None else None
        reports, ok = _verify_cover(cover, law, args.mode, args.tol, args.probe_grid)
        _emit(reports)
        return 0 if ok else 2
    if args.law is not None:
        reports, ok = _verify_law(_load_law(args.law), args.tol)
        _emit(reports)
        return 0 if ok else 2
    raise CLIError("verify needs --cover, --law, or --demo")


def cmd_demo(args):
    out_dir = args.out_dir or f"bipotkit-demo-{args.name}"
    return run_demo(args.name, out_dir, sys.stdout)


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="bipotkit",
        description="Bipotential toolkit: sampled laws, convex lagrangian "
                    "covers, and the constructions between them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-law", help="BB-graph and cyclic-monotonicity screens")
    p.add_argument("law", help="law graph JSON file")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=cmd_check_law)

    p = sub.add_parser("reconstruct", help="max-affine potential from samples")
    p.add_argument("law", help="law graph JSON file")
    p.add_argument("--base", type=int, default=0,
                   help="sample index normalized to value zero")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("build", help="CSV probe table of the cover's bipotential")
    p.add_argument("cover", help="cover JSON file")
    p.add_argument("--mode", choices=("analytic", "grid"), default="analytic")
    p.add_argument("--probe-grid", default="-2:2:41", metavar="LO:HI:COUNT")
    p.add_argument("--lambda-grid", default=None, metavar="LO:HI:COUNT")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("verify", help="axiom, coverage, and BIC reports")
    p.add_argument("--cover", default=None, help="cover JSON file")
    p.add_argument("--law", default=None, help="law graph JSON file")
    p.add_argument("--demo", default=None, help="named demo setup")
    p.add_argument("--mode", choices=("analytic", "grid"), default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--probe-grid", default="-2:2:21", metavar="LO:HI:COUNT")
    p.add_argument("--lambda-grid", default=None, metavar="LO:HI:COUNT")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("demo", help="end-to-end scenario with artifacts")
    p.add_argument("name", help="|".join(DEMO_NAMES))
    p.add_argument("--out-dir", default=None)
    p.set_defaults(fn=cmd_demo)

    return parser


_GRID_FLAGS = ("--probe-grid", "--lambda-grid")


def _join_grid_flags(argv):
    # lets "--probe-grid -2:2:41" survive argparse, which would otherwise
    # read the leading dash as a new option
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _GRID_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and ":" in argv[i + 1]:
            out.append(tok + "=" + argv[i + 1])
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None):
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_join_grid_flags(list(argv)))
    try:
        return args.fn(args)
    except CLIError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
