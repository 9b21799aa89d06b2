"""Bipotential construction, axiom verification, and graph extraction.

A bipotential b(x, y) is convex and lsc separately in each argument,
dominates the duality pairing everywhere, and touches it exactly on the
graph of the law it represents. Three constructions are provided: the
separable bipotential phi(x) + phi*(y), the infimum of a convex lagrangian
cover (closed form where the family admits one, or a parameter-grid sweep),
and the support-style extension that equals the pairing on a BB-graph and
+inf off it.

The bi-implicit convexity screen (:func:`bic_check`) probes whether a mix
of two member graphs in either argument stays dominated by some member,
the standing condition for the infimum construction to remain separately
convex. The family's candidate rule is tried first; the fallback sweep is
augmented with the exact per-probe minimizers, so a reported failure is a
genuine counterexample and not a grid artifact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .convex import _as_grid, conjugate
from .covers import (
    CandidateNotFoundError,
    FiniteSet,
    NormFamily,
    PreconditionError,
    QuadraticFamily,
    SeparableFamily,
    TabulatedFamily,
    p1_candidate,
)
from .laws import LawGraph, NotBBGraphError, bb_check
from .numerics import INF, as_vector, inner, norm


class AnalyticFormUnavailableError(ValueError):
    """Closed-form infimum requested for a family that has none."""


# ---------------------------------------------------------------------------
# bipotential objects


class Bipotential:
    """Extended-real b(x, y), never -inf, with a provenance label."""

    dim = 1
    provenance = "abstract"

    def __call__(self, x, y):
        return self.value(as_vector(x, self.dim), as_vector(y, self.dim))

    def value(self, x, y):
        raise NotImplementedError

    def gap(self, x, y):
        """b(x, y) - <x, y>; nonnegative everywhere for a true bipotential,
        zero exactly on the represented graph."""
        xv = as_vector(x, self.dim)
        yv = as_vector(y, self.dim)
        return self.value(xv, yv) - inner(xv, yv)

    def table(self, x_grid, y_grid):
        """Values over a product grid, x on rows and y on columns."""
        xg = _as_grid(x_grid, self.dim)
        yg = _as_grid(y_grid, self.dim)
        out = np.empty((xg.shape[0], yg.shape[0]))
        for i in range(xg.shape[0]):
            for j in range(yg.shape[0]):
                out[i, j] = self.value(xg[i], yg[j])
        return out


class CauchyProduct(Bipotential):
    """b(x, y) = ||x|| ||y||; contact exactly on the positively-collinear
    pairs, the archetypal non-separable bipotential."""

    def __init__(self, dim=1):
        self.dim = int(dim)
        self.provenance = "closed-form"

    def value(self, x, y):
        return norm(x) * norm(y)


class SeparableBipotential(Bipotential):
    """b(x, y) = phi(x) + phi*(y); its graph is the subdifferential of phi."""

    def __init__(self, potential, potential_star):
        if potential.dim != potential_star.dim:
            raise ValueError("potential and conjugate must share a dimension")
        self.potential = potential
        self.potential_star = potential_star
        self.dim = potential.dim
        self.provenance = "separable"

    def value(self, x, y):
        return self.potential.value(x) + self.potential_star.value(y)


class InfOfCoverBipotential(Bipotential):
    """b(x, y) = inf over lambda of phi_lambda(x) + phi*_lambda(y).

    Mode "analytic" evaluates the family's closed-form infimum and is exact;
    mode "grid" sweeps the parameter grid plus the family's finiteness
    boundaries and carries the grid resolution as error. Finite parameter
    sets are exact in either mode (the sweep is the whole set).
    """

    def __init__(self, cover, mode="analytic"):
        if mode not in ("analytic", "grid"):
            raise ValueError(f"mode must be 'analytic' or 'grid', got {mode!r}")
        if mode == "analytic" and isinstance(cover.family, TabulatedFamily):
            raise AnalyticFormUnavailableError(
                "tabulated families have no closed-form infimum; use mode='grid'")
        self.cover = cover
        self.mode = mode
        self.dim = cover.dim
        self.provenance = f"inf-of-cover/{mode}"

    def value(self, x, y):
        return self.infimum(x, y)[0]

    def argmin_lambda(self, x, y):
        """The parameter reported by :meth:`infimum` for this probe."""
        return self.infimum(x, y)[1]

    def infimum(self, x, y):
        """(value, parameter): the swept minimum in grid mode, the attaining
        or limiting parameter of the closed form in analytic mode."""
        xv = as_vector(x, self.dim)
        yv = as_vector(y, self.dim)
        if self.mode == "grid":
            return self.cover.grid_infimum(xv, yv)
        fam = self.cover.family
        dom = self.cover.domain
        if isinstance(fam, SeparableFamily):
            lam = float(dom.sample_grid[0])
            return fam.f(lam, xv, yv), lam
        if isinstance(dom, FiniteSet):
            # minimizing over a finite set exactly is the closed form
            return self.cover.grid_infimum(xv, yv)
        if isinstance(fam, QuadraticFamily):
            return _quadratic_infimum(dom, xv, yv)
        if isinstance(fam, NormFamily):
            return _norm_infimum(dom, xv, yv)
        raise AnalyticFormUnavailableError(
            f"no closed-form infimum for {type(fam).__name__}; use mode='grid'")


class BInfinityBipotential(Bipotential):
    """The pairing on the law's graph, +inf off it.

    The canonical bipotential of a BB-graph. Membership delegates to the
    law: stored pairs (snap-tolerant when requested) and declared slice
    hints.
    """

    def __init__(self, law, snap=0.0):
        self.law = law
        self.snap = float(snap)
        self.dim = law.dim
        self.provenance = "b-infinity"

    def value(self, x, y):
        if self.law.contains(x, y, snap=self.snap):
            return inner(x, y)
        return INF


# ---------------------------------------------------------------------------
# closed-form cover infima


def _quadratic_infimum(domain, x, y):
    """Exact infimum of (lam/2)||x||^2 + ||y||^2/(2 lam) over [lo, hi].

    The unconstrained minimizer is lam = ||y||/||x|| with value ||x|| ||y||;
    outside the interval the objective is monotone, so the nearer end
    attains. The 0 and inf members contribute their indicator values.
    """
    nx2 = inner(x, x)
    ny2 = inner(y, y)
    nx = norm(x)
    ny = norm(y)
    if nx == 0.0:
        if ny == 0.0:
            return 0.0, domain.lo
        if domain.includes_infinity:
            return 0.0, INF
        if domain.hi == 0.0:
            return INF, 0.0
        return (0.5 * ny2) / domain.hi, domain.hi
    if ny == 0.0:
        return (0.5 * domain.lo) * nx2, domain.lo
    lam_star = ny / nx
    lam = min(max(lam_star, domain.lo), domain.hi)
    if lam == lam_star:
        return nx * ny, lam
    if lam == 0.0:
        return INF, 0.0
    return (0.5 * lam) * nx2 + (0.5 * ny2) / lam, lam


def _norm_infimum(domain, x, y):
    """Exact infimum of lam ||x|| + indicator(||y|| <= lam) over [lo, hi].

    The smallest admitted parameter max(||y||, lo) attains; when no finite
    member admits y the value is +inf unless x = 0 meets the inf member.
    """
    nx = norm(x)
    ny = norm(y)
    if nx == 0.0:
        if ny <= domain.hi:
            return 0.0, max(ny, domain.lo)
        if domain.includes_infinity:
            return 0.0, INF
        return INF, domain.hi
    lam = max(ny, domain.lo)
    if lam > domain.hi:
        return INF, domain.hi
    if lam == ny:
        return nx * ny, lam
    return lam * nx, lam


# ---------------------------------------------------------------------------
# construction entry points


def build_separable(phi, dual_grid=None, primal_grid=None):
    """Separable bipotential phi(x) + phi*(y); sampled and max-affine forms
    conjugate on the supplied grids."""
    star = conjugate(phi, dual_grid=dual_grid, primal_grid=primal_grid)
    return SeparableBipotential(phi, star)


def build_inf(cover, mode="analytic"):
    """Infimum-of-cover bipotential; mode "analytic" demands a closed form."""
    return InfOfCoverBipotential(cover, mode=mode)


def build_b_infinity(law, tol=1e-9, snap=0.0):
    """Pairing-on-the-graph bipotential over a law that must first pass the
    BB-graph test; refuses otherwise with the failing slice attached."""
    report = bb_check(law, tol)
    if not report.is_bb_graph:
        raise NotBBGraphError(report)
    return BInfinityBipotential(law, snap=snap)


# ---------------------------------------------------------------------------
# axiom verification on finite probe grids


@dataclass(frozen=True)
class AxiomCounterexample:
    axiom: str            # "lower-bound", "convexity-x", "convexity-y", "graph-closure"
    x: np.ndarray
    y: np.ndarray
    violation: float


@dataclass(frozen=True)
class NoContactNote:
    """A probe slice whose gap never reaches the contact tolerance; the
    graph misses the grid there, which a finite probe cannot refute."""

    side: str             # "primal" or "dual"
    at: np.ndarray
    min_gap: float


@dataclass(frozen=True)
class AxiomReport:
    lower_bound_ok: bool
    separate_convexity_ok: bool
    graph_equivalence_ok: bool
    counterexamples: list
    no_contact: list

    @property
    def is_bipotential(self):
        return (self.lower_bound_ok and self.separate_convexity_ok
                and self.graph_equivalence_ok)


def _midpoint_triples(g):
    """(i, j, k) with g[k] the on-grid midpoint of g[i], g[j]; matched after
    rounding to 9 decimals so uniform float grids qualify."""
    index = {}
    for k in range(g.shape[0]):
        index.setdefault(tuple(np.round(g[k], 9)), k)
    out = []
    for i in range(g.shape[0]):
        for j in range(i + 1, g.shape[0]):
            k = index.get(tuple(np.round(0.5 * (g[i] + g[j]), 9)))
            if k is not None and k != i and k != j:
                out.append((i, j, k))
    return out


def verify_axioms(b, x_grid, y_grid, tol=1e-9):
    """Check the bipotential axioms on a finite product grid.

    Domination of the pairing is checked pointwise; separate convexity
    through on-grid midpoints along each axis; and the graph axiom through
    its grid shadow: the contact set {gap <= tol} must be midpoint-closed in
    every slice, since slices of a true contact graph are convex (2 tol
    absorbs the two endpoints' own slack). Slices with no contact at all go
    to ``no_contact``, diagnostics rather than failures.
    """
    xg = _as_grid(x_grid, b.dim)
    yg = _as_grid(y_grid, b.dim)
    B = b.table(xg, yg)
    P = kernels.pairing_matrix(np.ascontiguousarray(xg), np.ascontiguousarray(yg))
    G = B - P

    counterexamples = []
    bad = G < -tol
    for i, j in zip(*np.nonzero(bad)):
        counterexamples.append(AxiomCounterexample(
            "lower-bound", xg[i].copy(), yg[j].copy(), float(-G[i, j])))
    lower_ok = not bad.any()

    conv = []
    x_triples = _midpoint_triples(xg)
    for i, j, k in x_triples:
        rhs = 0.5 * (B[i, :] + B[j, :])
        for c in np.nonzero(B[k, :] > rhs + tol)[0]:
            conv.append(AxiomCounterexample(
                "convexity-x", xg[k].copy(), yg[c].copy(), float(B[k, c] - rhs[c])))
    y_triples = _midpoint_triples(yg)
    for i, j, k in y_triples:
        rhs = 0.5 * (B[:, i] + B[:, j])
        for r in np.nonzero(B[:, k] > rhs + tol)[0]:
            conv.append(AxiomCounterexample(
                "convexity-y", xg[r].copy(), yg[k].copy(), float(B[r, k] - rhs[r])))
    convexity_ok = not conv
    counterexamples.extend(conv)

    contact = G <= tol
    closure = []
    for i, j, k in y_triples:
        gone = contact[:, i] & contact[:, j] & ~(G[:, k] <= 2.0 * tol)
        for r in np.nonzero(gone)[0]:
            closure.append(AxiomCounterexample(
                "graph-closure", xg[r].copy(), yg[k].copy(), float(G[r, k])))
    for i, j, k in x_triples:
        gone = contact[i, :] & contact[j, :] & ~(G[k, :] <= 2.0 * tol)
        for c in np.nonzero(gone)[0]:
            closure.append(AxiomCounterexample(
                "graph-closure", xg[k].copy(), yg[c].copy(), float(G[k, c])))
    graph_ok = not closure
    counterexamples.extend(closure)

    no_contact = []
    for i in range(xg.shape[0]):
        m = float(np.min(G[i, :]))
        if not m <= tol:
            no_contact.append(NoContactNote("primal", xg[i].copy(), m))
    for j in range(yg.shape[0]):
        m = float(np.min(G[:, j]))
        if not m <= tol:
            no_contact.append(NoContactNote("dual", yg[j].copy(), m))

    return AxiomReport(lower_ok, convexity_ok, graph_ok, counterexamples, no_contact)


def graph_of_bipotential(b, x_grid, y_grid, tol=1e-9):
    """Law graph of the contact set {b(x, y) - <x, y> <= tol} on a product
    grid. Raises when empty: a law graph cannot be."""
    xg = _as_grid(x_grid, b.dim)
    yg = _as_grid(y_grid, b.dim)
    B = b.table(xg, yg)
    P = kernels.pairing_matrix(np.ascontiguousarray(xg), np.ascontiguousarray(yg))
    pairs = [(xg[i].copy(), yg[j].copy())
             for i in range(xg.shape[0]) for j in range(yg.shape[0])
             if B[i, j] - P[i, j] <= tol]
    if not pairs:
        raise ValueError("no contact point on the probe grids; "
                         "a law graph cannot be empty")
    return LawGraph(pairs)


# ---------------------------------------------------------------------------
# bi-implicit convexity screen


@dataclass(frozen=True)
class BICCounterexample:
    argument: str         # "first" or "second": the slot the mix happened in
    lam1: float
    z1: np.ndarray
    lam2: float
    z2: np.ndarray
    alpha: float
    fixed: np.ndarray     # the probe held fixed in the other slot
    deficit: float        # min over searched lambdas of lhs - rhs


@dataclass(frozen=True)
class BICReport:
    is_bic: bool
    counterexamples: list
    tuples_checked: int = 0


@dataclass(frozen=True)
class BICProbePlan:
    """Probe tuples for :func:`bic_check`: ordered parameter pairs, mixing
    weights, and the point stacks mixed in each argument slot."""

    lam_pairs: tuple
    alphas: tuple
    primal_points: tuple
    dual_points: tuple


def embed_primal(s, dim=1):
    """Scalar probe placed on the first axis."""
    v = np.zeros(dim)
    v[0] = float(s)
    return v


def embed_dual(t, dim=1):
    """Scalar probe placed on the second axis (the first when dim == 1), so
    primal and dual probes are orthogonal in dimension two and up."""
    v = np.zeros(dim)
    v[min(1, dim - 1)] = float(t)
    return v


def default_probe_plan(cover):
    """Probe tuples sized to the family: member parameters spanning two
    decades, the full [0, 1] mixing range, and probe points across [-2, 2]."""
    fam = cover.family
    dim = cover.dim
    xs = tuple(embed_primal(s, dim) for s in np.linspace(-2.0, 2.0, 9))
    ys = tuple(embed_dual(t, dim) for t in np.linspace(-2.0, 2.0, 5))
    alphas = (0.0, 0.25, 0.5, 1.0)
    if isinstance(fam, (QuadraticFamily, NormFamily)):
        lams = [lam for lam in (0.5, 1.0, 2.0, 4.0) if cover.domain.contains(lam)]
    else:
        lams = [float(lam) for lam in cover.domain.sample_grid[:8]]
    pairs = tuple((a, b) for a in lams for b in lams)
    return BICProbePlan(pairs, alphas, xs, ys)


def _mix_values(alpha, v1, beta, v2):
    # zero-weight members drop out entirely, so 0 * inf never appears
    t1 = 0.0 if alpha == 0.0 else alpha * v1
    t2 = 0.0 if beta == 0.0 else beta * v2
    return t1 + t2


def _candidate_lambda(cover, lam1, z1, lam2, z2, alpha, fixed, first, tol):
    """The family's selection rule when the subgradient preconditions hold,
    else None."""
    fam = cover.family
    try:
        if first:
            return p1_candidate(cover, lam1, lam2, alpha, z1, z2, fixed, tol=tol)
        for lam, z in ((lam1, z1), (lam2, z2)):
            if fam.f(lam, fixed, z) - inner(fixed, z) > tol:
                return None
        return fam.candidate_dual(lam1, lam2, alpha, fixed)
    except (PreconditionError, CandidateNotFoundError):
        return None


def bic_check(cover, plan=None, tol=1e-9):
    """Screen the cover for bi-implicit convexity over a probe plan.

    Each tuple demands a parameter whose member dominates the mixed point:
    f(lam, mix, fixed) <= alpha f(lam1, ., .) + beta f(lam2, ., .) + tol,
    and symmetrically for mixes in the second argument. Infinite right
    sides hold vacuously. The search tries the family's candidate rule
    first, then the member parameters themselves, the exact per-probe
    minimizers and finiteness boundaries, then the whole parameter grid in
    ascending order; a failure records the tuple with its least deficit.
    """
    if plan is None:
        plan = default_probe_plan(cover)
    fam = cover.family
    dim = cover.dim
    xs = [as_vector(p, dim) for p in plan.primal_points]
    ys = [as_vector(p, dim) for p in plan.dual_points]
    counterexamples = []
    checked = 0

    def deficit_of(lam1, z1, lam2, z2, alpha, fixed, first):
        beta = 1.0 - alpha
        if first:
            rhs = _mix_values(alpha, fam.f(lam1, z1, fixed), beta, fam.f(lam2, z2, fixed))
        else:
            rhs = _mix_values(alpha, fam.f(lam1, fixed, z1), beta, fam.f(lam2, fixed, z2))
        if rhs == INF:
            return None
        mix = alpha * z1 + beta * z2
        point = (mix, fixed) if first else (fixed, mix)
        lams = []
        cand = _candidate_lambda(cover, lam1, z1, lam2, z2, alpha, fixed, first, tol)
        if cand is not None:
            lams.append(cand)
        lams.extend((lam1, lam2))
        lams.extend(fam.exact_minimizer_lams(*point))
        lams.extend(fam.finite_boundary_lams(*point))
        best = INF
        seen = set()
        for lam in lams:
            if lam in seen or not cover.domain.contains(lam):
                continue
            seen.add(lam)
            lhs = fam.f(lam, point[0], point[1])
            if lhs <= rhs + tol:
                return None
            best = min(best, lhs - rhs)
        grid = cover.domain.sample_grid
        vals = fam.f_many(grid, point[0], point[1])
        if bool(np.any(vals <= rhs + tol)):
            return None
        return min(best, float(np.min(vals) - rhs))

    for lam1, lam2 in plan.lam_pairs:
        for alpha in plan.alphas:
            for z1 in xs:
                for z2 in xs:
                    for fixed in ys:
                        checked += 1
                        d = deficit_of(lam1, z1, lam2, z2, alpha, fixed, True)
                        if d is not None:
                            counterexamples.append(BICCounterexample(
                                "first", lam1, z1, lam2, z2, alpha, fixed, d))
            for z1 in ys:
                for z2 in ys:
                    for fixed in xs:
                        checked += 1
                        d = deficit_of(lam1, z1, lam2, z2, alpha, fixed, False)
                        if d is not None:
                            counterexamples.append(BICCounterexample(
                                "second", lam1, z1, lam2, z2, alpha, fixed, d))
    return BICReport(not counterexamples, counterexamples, checked)
