"""Worked scenarios: curated laws, covers, and full pipeline runs.

Each demo wires the whole chain together: declare a sampled law, choose a
cover whose member graphs union to it, certify coverage, screen bi-implicit
convexity, build the infimum bipotential, verify the axioms on probe grids,
and extract the contact graph back. The two Cauchy demos reconstruct
b(x, y) = ||x|| ||y|| from the quadratic and norm covers; the plasticity
demo drives a single-parameter norm cover against a rigid-plastic yielding
law; the separable demo closes the loop on an ordinary potential.
"""

from __future__ import annotations

import os

import numpy as np

from .bipotentials import (
    bic_check,
    build_inf,
    default_probe_plan,
    embed_dual,
    embed_primal,
    graph_of_bipotential,
    verify_axioms,
)
from .convex import Affine, IndicatorPoint, Quadratic, graph_of
from .covers import (
    ClosedInterval,
    Cover,
    NormFamily,
    coverage_check,
    norm_cover,
    quadratic_cover,
    separable_cover,
    tabulated_cover,
)
from .formats import csv_header, dumps, probe_rows, save_cover, save_law, to_jsonable
from .laws import Ball, HalfLineRay, LawGraph, Segment, Singleton
from .numerics import norm

DEMO_NAMES = ("cauchy-quadratic", "cauchy-norm", "plasticity", "separable")


# ---------------------------------------------------------------------------
# curated laws


def build_sign_law():
    """The sign law, the subdifferential of the absolute value: singletons
    off zero, the full interval [-1, 1] at zero, half-lines dually."""
    pairs = [([-1.0], [-1.0]), ([0.0], [-1.0]), ([0.0], [0.0]),
             ([0.0], [1.0]), ([1.0], [1.0])]
    primal = {(0.0,): Segment([-1.0], [1.0])}
    dual = {(-1.0,): HalfLineRay([0.0], [-1.0]),
            (1.0,): HalfLineRay([0.0], [1.0])}
    return LawGraph(pairs, primal_hints=primal, dual_hints=dual)


def build_antitone_law():
    """Two decreasing samples; a BB-graph, but not cyclically monotone."""
    return LawGraph([([0.0], [0.0]), ([1.0], [-1.0])])


def build_cauchy_law():
    """Positively-collinear samples in dimension two.

    The full law is {(x, y): y = mu x, mu >= 0} plus everything through the
    origin; slices are half-lines (the whole space at zero), declared as
    hints since no finite sample can witness a continuum.
    """
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    diag = np.array([1.0, 1.0])
    zero = np.zeros(2)
    pairs = [(e1, 2 * e1), (2 * e1, e1), (diag, diag), (e2, 3 * e2), (zero, zero)]
    primal = {
        (1.0, 0.0): HalfLineRay(zero, e1),
        (2.0, 0.0): HalfLineRay(zero, e1),
        (1.0, 1.0): HalfLineRay(zero, diag),
        (0.0, 1.0): HalfLineRay(zero, e2),
        (0.0, 0.0): Ball(zero, np.inf),
    }
    dual = {
        (2.0, 0.0): HalfLineRay(zero, e1),
        (1.0, 0.0): HalfLineRay(zero, e1),
        (1.0, 1.0): HalfLineRay(zero, diag),
        (0.0, 3.0): HalfLineRay(zero, e2),
        (0.0, 0.0): Ball(zero, np.inf),
    }
    return LawGraph(pairs, primal_hints=primal, dual_hints=dual)


def build_plasticity_law():
    """Rigid-plastic yielding law at unit threshold, dimension two.

    x = 0 while ||y|| < 1 (the elastic ball); once ||y|| = 1 the flow x runs
    along the outward ray through y.
    """
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    zero = np.zeros(2)
    pairs = [(zero, zero), (zero, 0.5 * e1), (e1, e1), (2 * e1, e1),
             (e2, e2), (3 * e2, e2), (-e1, -e1)]
    primal = {
        (0.0, 0.0): Ball(zero, 1.0),
        (1.0, 0.0): Singleton(e1),
        (2.0, 0.0): Singleton(e1),
        (0.0, 1.0): Singleton(e2),
        (0.0, 3.0): Singleton(e2),
        (-1.0, 0.0): Singleton(-e1),
    }
    dual = {
        (0.0, 0.0): Singleton(zero),
        (0.5, 0.0): Singleton(zero),
        (1.0, 0.0): HalfLineRay(zero, e1),
        (0.0, 1.0): HalfLineRay(zero, e2),
        (-1.0, 0.0): HalfLineRay(zero, -e1),
    }
    return LawGraph(pairs, primal_hints=primal, dual_hints=dual)


# ---------------------------------------------------------------------------
# the negative control


def nonbic_cover():
    """Tabulated cover derived from the antitone law; not a BIC-cover.

    One affine member per antitone pair. Mixing the two conjugate domains
    {0} and {-1} in the second argument lands between the indicators, where
    every member is infinite while the mixed right side stays finite.
    """
    return tabulated_cover([
        (0.0, Affine(np.zeros(1)), IndicatorPoint(np.zeros(1))),
        (1.0, Affine(np.array([-1.0])), IndicatorPoint(np.array([-1.0]))),
    ])


# ---------------------------------------------------------------------------
# demo setups


def _axis_grid(lo=-2.0, hi=2.0, count=41):
    return np.linspace(lo, hi, count)


def demo_setup(name):
    """Law, cover, mode, probe stacks, and tolerances for a named demo."""
    if name == "cauchy-quadratic":
        law = build_cauchy_law()
        cover = quadratic_cover(dim=2)
        xg = np.array([embed_primal(s, 2) for s in _axis_grid()])
        yg = np.array([embed_dual(t, 2) for t in _axis_grid()])
        return {"law": law, "cover": cover, "mode": "grid", "tol": 1e-3,
                "x_probes": xg, "y_probes": yg, "reference": "cauchy"}
    if name == "cauchy-norm":
        law = build_cauchy_law()
        cover = norm_cover(dim=2)
        xg = np.array([embed_primal(s, 2) for s in _axis_grid()])
        yg = np.array([embed_dual(t, 2) for t in _axis_grid()])
        return {"law": law, "cover": cover, "mode": "grid", "tol": 1e-3,
                "x_probes": xg, "y_probes": yg, "reference": "cauchy"}
    if name == "plasticity":
        law = build_plasticity_law()
        dom = ClosedInterval(1.0, 1.0)
        cover = Cover(dom, NormFamily(2))
        xg = np.array([embed_primal(s, 2) for s in _axis_grid()])
        # probe y along the same axis so the yielding rays are in contact
        yg = np.array([embed_primal(t, 2) for t in _axis_grid()])
        return {"law": law, "cover": cover, "mode": "analytic", "tol": 1e-9,
                "x_probes": xg, "y_probes": yg, "reference": None}
    if name == "separable":
        phi = Quadratic(1.0, 1)
        grid = _axis_grid(-2.0, 2.0, 21)
        law = graph_of(phi, grid, grid)
        cover = separable_cover(phi)
        xg = grid[:, None]
        yg = grid[:, None]
        return {"law": law, "cover": cover, "mode": "analytic", "tol": 1e-9,
                "x_probes": xg, "y_probes": yg, "reference": "separable"}
    raise KeyError(f"unknown demo {name!r}; known: {', '.join(DEMO_NAMES)}")


def _reference_line(kind, b, setup):
    """The demo's closing comparison against its closed-form target."""
    xg, yg = setup["x_probes"], setup["y_probes"]
    worst = 0.0
    if kind == "cauchy":
        for x in xg:
            for y in yg:
                worst = max(worst, abs(b.value(x, y) - norm(x) * norm(y)))
        return f"max |b - ||x|| ||y||| = {worst:.6g}"
    if kind == "separable":
        fam = setup["cover"].family
        for x in xg:
            for y in yg:
                target = fam.potential.value(x) + fam.potential_star.value(y)
                worst = max(worst, abs(b.value(x, y) - target))
        return f"max |b - (phi(x) + phi*(y))| = {worst:.6g}"
    return None


def run_demo(name, out_dir, stream):
    """Full pipeline for one demo; writes artifacts, prints a transcript,
    returns the exit code (0 all checks pass, 2 otherwise)."""
    try:
        setup = demo_setup(name)
    except KeyError as exc:
        print(exc.args[0], file=stream)
        return 1
    law, cover, mode = setup["law"], setup["cover"], setup["mode"]
    xg, yg, tol = setup["x_probes"], setup["y_probes"], setup["tol"]
    os.makedirs(out_dir, exist_ok=True)
    save_law(law, os.path.join(out_dir, "law.json"))
    save_cover(cover, os.path.join(out_dir, "cover.json"))

    print(f"demo {name}: dimension {law.dim}, {len(law)} sampled pairs", file=stream)
    ok = True

    coverage = coverage_check(cover, law, tol=max(tol, 1e-3))
    ok &= coverage.covered
    print(f"coverage: {'covered' if coverage.covered else 'FAILED'} "
          f"(missed {len(coverage.missed_pairs)}, "
          f"spurious {len(coverage.spurious_pairs)})", file=stream)

    bic = bic_check(cover, default_probe_plan(cover))
    ok &= bic.is_bic
    print(f"bic: {'pass' if bic.is_bic else 'FAILED'} "
          f"({bic.tuples_checked} tuples, "
          f"{len(bic.counterexamples)} counterexamples)", file=stream)

    b = build_inf(cover, mode=mode)
    print(f"bipotential: {b.provenance}", file=stream)

    axioms = verify_axioms(b, xg, yg, tol=tol)
    ok &= axioms.is_bipotential
    print(f"axioms: lower-bound {'ok' if axioms.lower_bound_ok else 'FAILED'}, "
          f"convexity {'ok' if axioms.separate_convexity_ok else 'FAILED'}, "
          f"graph {'ok' if axioms.graph_equivalence_ok else 'FAILED'} "
          f"(no-contact slices {len(axioms.no_contact)})", file=stream)

    graph = graph_of_bipotential(b, xg, yg, tol=tol)
    print(f"graph: {len(graph)} contact pairs on the probe grids", file=stream)

    with open(os.path.join(out_dir, "build.csv"), "w") as fh:
        fh.write(csv_header(law.dim) + "\n")
        for line in probe_rows(b, xg, yg):
            fh.write(line + "\n")
    reports = {"coverage": to_jsonable(coverage), "bic": to_jsonable(bic),
               "axioms": to_jsonable(axioms)}
    with open(os.path.join(out_dir, "reports.json"), "w") as fh:
        fh.write(dumps(reports))
        fh.write("\n")

    line = _reference_line(setup["reference"], b, setup)
    if line is not None:
        print(line, file=stream)
    print(f"artifacts written to {out_dir}", file=stream)
    return 0 if ok else 2
