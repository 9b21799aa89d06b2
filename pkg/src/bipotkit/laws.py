"""Sampled multivalued laws and their graph-level tests.

A law is a finite set of pairs (x, y). Its primal slices m(x) and dual
slices m*(y) decide whether the law can carry a bipotential at all: every
slice must be convex and closed. Finite slices can only witness convexity
through midpoints, so laws whose true slices are continua carry declarative
slice hints (segment, ball, ray, singleton) that a finite sample cannot
express on its own.

Cyclic monotonicity is decided on the complete digraph over the sample
indices with edge weight w(i, j) = <x_j - x_i, y_i>: the samples are
cyclically monotone iff no directed cycle has positive weight. Detection
negates the weights and runs Bellman-Ford sweeps; a relaxation that still
succeeds after n-1 sweeps exposes a positive cycle, which is extracted and
returned as the witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .convex import MaxAffine
from .numerics import as_vector, inner, norm, vec_key

DEFAULT_TOL = 1e-9


class NotCyclicallyMonotoneError(ValueError):
    """Raised when an operation requires cyclically monotone samples."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"samples are not cyclically monotone: cycle {report.witness_cycle} "
            f"has sum {report.cycle_sum}")


class NotBBGraphError(ValueError):
    """Raised when an operation requires a BB-graph."""

    def __init__(self, report):
        self.report = report
        fs = report.failing_slice
        super().__init__(
            f"not a BB-graph: {fs.which} slice at {fs.at.tolist()} is not convex "
            f"(midpoint {fs.witness_midpoint.tolist()} missing)")


# ---------------------------------------------------------------------------
# slice hints


@dataclass(frozen=True)
class Singleton:
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point))

    def contains(self, v, tol):
        return norm(as_vector(v, self.point.size) - self.point) <= tol


@dataclass(frozen=True)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_vector(self.a))
        object.__setattr__(self, "b", as_vector(self.b, self.a.size))

    def contains(self, v, tol):
        vv = as_vector(v, self.a.size)
        d = self.b - self.a
        dd = inner(d, d)
        if dd == 0.0:
            return norm(vv - self.a) <= tol
        t = min(1.0, max(0.0, inner(vv - self.a, d) / dd))
        return norm(vv - (self.a + t * d)) <= tol


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        r = float(self.radius)
        if not r >= 0:
            raise ValueError(f"ball radius must be nonnegative, got {r}")
        object.__setattr__(self, "radius", r)

    def contains(self, v, tol):
        if self.radius == np.inf:
            as_vector(v, self.center.size)
            return True
        return norm(as_vector(v, self.center.size) - self.center) <= self.radius + tol


@dataclass(frozen=True)
class HalfLineRay:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", as_vector(self.origin))
        d = as_vector(self.direction, self.origin.size)
        if norm(d) == 0.0:
            raise ValueError("ray direction must be nonzero")
        object.__setattr__(self, "direction", d)

    def contains(self, v, tol):
        vv = as_vector(v, self.origin.size)
        d = self.direction
        t = max(0.0, inner(vv - self.origin, d) / inner(d, d))
        return norm(vv - (self.origin + t * d)) <= tol


SLICE_HINT_SHAPES = (Singleton, Segment, Ball, HalfLineRay)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class FailingSlice:
    which: str            # "primal" or "dual"
    at: np.ndarray        # the slice coordinate
    witness_midpoint: np.ndarray


@dataclass(frozen=True)
class BBReport:
    is_bb_graph: bool
    failing_slice: Optional[FailingSlice] = None


@dataclass(frozen=True)
class CycleReport:
    cyclically_monotone: bool
    witness_cycle: Optional[tuple] = None
    cycle_sum: float = 0.0


# ---------------------------------------------------------------------------
# the law graph


class LawGraph:
    """Nonempty finite sample of a multivalued law, with optional slice hints.

    ``primal_hints`` maps an x-coordinate to the declared shape of m(x);
    ``dual_hints`` maps a y-coordinate to the declared shape of m*(y). Every
    stored pair must sit inside the hints that mention it.
    """

    def __init__(self, pairs, primal_hints=None, dual_hints=None, hint_tol=DEFAULT_TOL):
        pairs = list(pairs)
        if not pairs:
            raise ValueError("a law graph needs at least one pair")
        xs = [as_vector(x) for x, _ in pairs]
        dim = xs[0].size
        xs = [as_vector(x, dim) for x in xs]
        ys = [as_vector(y, dim) for _, y in pairs]
        self.xs = np.array(xs)
        self.ys = np.array(ys)
        self.dim = dim
        self.hint_tol = float(hint_tol)
        self.primal_hints = {vec_key(at): hint for at, hint in dict(primal_hints or {}).items()}
        self.dual_hints = {vec_key(at): hint for at, hint in dict(dual_hints or {}).items()}
        self._validate_hints()

    def _validate_hints(self):
        dom = {vec_key(x) for x in self.xs}
        img = {vec_key(y) for y in self.ys}
        for key in self.primal_hints:
            if key not in dom:
                raise ValueError(f"primal hint anchored at {key} but no pair has that x")
        for key in self.dual_hints:
            if key not in img:
                raise ValueError(f"dual hint anchored at {key} but no pair has that y")
        for i in range(len(self)):
            kx, ky = vec_key(self.xs[i]), vec_key(self.ys[i])
            hint = self.primal_hints.get(kx)
            if hint is not None and not hint.contains(self.ys[i], self.hint_tol):
                raise ValueError(f"pair {i}: y {self.ys[i].tolist()} lies outside the "
                                 f"declared primal slice hint at x {list(kx)}")
            hint = self.dual_hints.get(ky)
            if hint is not None and not hint.contains(self.xs[i], self.hint_tol):
                raise ValueError(f"pair {i}: x {self.xs[i].tolist()} lies outside the "
                                 f"declared dual slice hint at y {list(ky)}")

    def __len__(self):
        return self.xs.shape[0]

    @property
    def pairs(self):
        return [(self.xs[i].copy(), self.ys[i].copy()) for i in range(len(self))]

    def pair_keys(self):
        """Set of exact-coordinate pair keys, for set-level comparisons."""
        return {(vec_key(self.xs[i]), vec_key(self.ys[i])) for i in range(len(self))}

    def slice(self, x):
        """All y with (x, y) stored, by exact coordinate match."""
        xv = as_vector(x, self.dim)
        return [self.ys[i].copy() for i in range(len(self)) if np.all(self.xs[i] == xv)]

    def dual_slice(self, y):
        """All x with (x, y) stored, by exact coordinate match."""
        yv = as_vector(y, self.dim)
        return [self.xs[i].copy() for i in range(len(self)) if np.all(self.ys[i] == yv)]

    def domain(self):
        """Distinct x coordinates in first-appearance order."""
        seen, out = set(), []
        for i in range(len(self)):
            k = vec_key(self.xs[i])
            if k not in seen:
                seen.add(k)
                out.append(self.xs[i].copy())
        return out

    def image(self):
        """Distinct y coordinates in first-appearance order."""
        seen, out = set(), []
        for i in range(len(self)):
            k = vec_key(self.ys[i])
            if k not in seen:
                seen.add(k)
                out.append(self.ys[i].copy())
        return out

    def contains(self, x, y, snap=0.0):
        """Membership of (x, y) in the law: a stored pair up to ``snap``, or a
        point of a declared slice hint."""
        xv = as_vector(x, self.dim)
        yv = as_vector(y, self.dim)
        if snap > 0.0:
            for i in range(len(self)):
                if norm(self.xs[i] - xv) <= snap and norm(self.ys[i] - yv) <= snap:
                    return True
        else:
            for i in range(len(self)):
                if np.all(self.xs[i] == xv) and np.all(self.ys[i] == yv):
                    return True
        hint = self.primal_hints.get(vec_key(xv))
        if hint is not None and hint.contains(yv, self.hint_tol):
            return True
        hint = self.dual_hints.get(vec_key(yv))
        if hint is not None and hint.contains(xv, self.hint_tol):
            return True
        return False


# ---------------------------------------------------------------------------
# BB-graph test


def _midpoint_failure(members, tol):
    """First midpoint not within tol of some member, or None.

    Finite sets are closed, so closedness holds vacuously; convexity of a
    finite sample is testable only through midpoint membership.
    """
    m = len(members)
    for i in range(m):
        for j in range(i + 1, m):
            mid = 0.5 * (members[i] + members[j])
            if min(norm(mid - mem) for mem in members) > tol:
                return mid
    return None


def bb_check(law, tol=DEFAULT_TOL):
    """Decide whether the sampled law is a BB-graph.

    Every primal and dual slice must be convex and closed. Hinted slices
    pass by construction (the hint shapes are convex and closed, and pair
    membership was validated when the law was built); unhinted slices are
    screened by the midpoint test at tolerance tol.
    """
    for x in law.domain():
        if vec_key(x) in law.primal_hints:
            continue
        mid = _midpoint_failure(law.slice(x), tol)
        if mid is not None:
            return BBReport(False, FailingSlice("primal", x, mid))
    for y in law.image():
        if vec_key(y) in law.dual_hints:
            continue
        mid = _midpoint_failure(law.dual_slice(y), tol)
        if mid is not None:
            return BBReport(False, FailingSlice("dual", y, mid))
    return BBReport(True, None)


# ---------------------------------------------------------------------------
# cyclic monotonicity


def weight_matrix(law):
    """Dense w[i, j] = <x_j - x_i, y_i> over the sample indices.

    Accumulated coordinate by coordinate in the same order as
    :func:`bipotkit.numerics.inner` applied to (x_j - x_i, y_i), so scalar
    re-checks reproduce the matrix entries bit for bit.
    """
    xs, ys = law.xs, law.ys
    m, n = xs.shape
    w = np.zeros((m, m))
    for k in range(n):
        w += (xs[None, :, k] - xs[:, None, k]) * ys[:, None, k]
    return w


def cycle_sum(w, cycle):
    """Weight of a directed cycle, accumulated in traversal order."""
    s = 0.0
    for t in range(len(cycle)):
        s += w[cycle[t], cycle[(t + 1) % len(cycle)]]
    return s


def _canonical_cycle(cycle):
    k = int(np.argmin(cycle))
    return tuple(cycle[k:] + cycle[:k])


def _cycle_from_pred(pred, start, m):
    u = int(start)
    for _ in range(m):
        if pred[u] < 0:
            return None
        u = int(pred[u])
    seq = [u]
    v = int(pred[u])
    steps = 0
    while v != u:
        if v < 0 or steps > m:
            return None
        seq.append(v)
        v = int(pred[v])
        steps += 1
    return _canonical_cycle(list(reversed(seq)))


def cyclic_monotonicity_check(law, tol=DEFAULT_TOL):
    """Bellman-Ford screen for positive cycles in the sample weights.

    Cycle sums in (0, tol] are treated as zero: floating chain sums of
    genuinely monotone data land there. The witness, when present, is a
    positive cycle with sum above tol, rotated so its smallest index leads.
    """
    w = weight_matrix(law)
    m = w.shape[0]
    if m < 2:
        return CycleReport(True, None, 0.0)
    pred, improvement = kernels.bellman_ford(-w)
    best_cycle, best_sum = None, 0.0
    seen = set()
    for j in np.nonzero(improvement > 0.0)[0]:
        cyc = _cycle_from_pred(pred, j, m)
        if cyc is None or cyc in seen:
            continue
        seen.add(cyc)
        s = cycle_sum(w, list(cyc))
        if s > best_sum:
            best_cycle, best_sum = cyc, s
    if best_cycle is not None and best_sum > tol:
        return CycleReport(False, best_cycle, best_sum)
    return CycleReport(True, None, 0.0)


# ---------------------------------------------------------------------------
# reconstruction of a convex potential from cyclically monotone samples


def rockafellar_reconstruct(law, base=0, tol=DEFAULT_TOL):
    """Max-affine potential whose subdifferential passes through the samples.

    Offsets come from maximal chain sums c_i out of the base sample; the
    result is phi_hat(x) = max_i (c_i + <x - x_i, y_i>), normalized so
    phi_hat(x_base) = 0 (up to tol for borderline cycle sums). Refuses
    non-monotone samples with the witness cycle attached.
    """
    m = len(law)
    if not 0 <= base < m:
        raise ValueError(f"base index {base} out of range for {m} samples")
    report = cyclic_monotonicity_check(law, tol)
    if not report.cyclically_monotone:
        raise NotCyclicallyMonotoneError(report)
    w = weight_matrix(law)
    c = kernels.longest_path(w, base)
    offsets = np.array([c[i] - inner(law.xs[i], law.ys[i]) for i in range(m)])
    return MaxAffine(law.ys.copy(), offsets)
