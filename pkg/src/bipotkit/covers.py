"""Convex lagrangian covers: parameterized families lambda -> phi_lambda.

A cover evaluates f(lambda, x, y) = phi_lambda(x) + phi*_lambda(y) over a
compact parameter set that may include the 0 and +inf sentinels; those ends
degenerate to exact indicator forms, never to large finite surrogates. The
union of the member graphs should reproduce a target law, which
:func:`coverage_check` certifies sample-wise in both directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .convex import (
    ConvexFunction,
    IndicatorBall,
    IndicatorPoint,
    Quadratic,
    ScaledNorm,
    _as_grid,
    conjugate,
)
from .numerics import INF, as_vector, ensure_extended, inner, norm

DEFAULT_GRID_LO = 1e-4
DEFAULT_GRID_HI = 1e4
DEFAULT_GRID_POINTS = 512

# numeric infima over a log grid carry the grid's own resolution, so
# sample-based certifications default to a matching tolerance
GRID_TOL = 1e-3


class PreconditionError(ValueError):
    """A candidate-selection precondition (subgradient membership) failed."""


class CandidateNotFoundError(ValueError):
    """No tabulated parameter satisfies the candidate condition."""


# ---------------------------------------------------------------------------
# parameter domains


@dataclass(frozen=True)
class ClosedInterval:
    """[lo, hi] with lo >= 0, optionally extended by the +inf sentinel.

    The sample grid is log-spaced between grid_lo and grid_hi (defaults
    clamp the unbounded ends to [1e-4, 1e4]) and always carries both
    endpoints, plus 0 and inf when they belong to the set.
    """

    lo: float
    hi: float
    includes_infinity: bool = False
    grid_points: int = DEFAULT_GRID_POINTS
    grid_lo: float = None
    grid_hi: float = None

    def __post_init__(self):
        lo = ensure_extended(self.lo, "lo")
        hi = ensure_extended(self.hi, "hi")
        if lo < 0 or hi < lo:
            raise ValueError(f"need 0 <= lo <= hi, got [{lo}, {hi}]")
        if lo == INF:
            raise ValueError("lo must be finite")
        if int(self.grid_points) < 2:
            raise ValueError("grid_points must be at least 2")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "grid_points", int(self.grid_points))
        glo = self.grid_lo if self.grid_lo is not None else (lo if lo > 0 else DEFAULT_GRID_LO)
        ghi = self.grid_hi if self.grid_hi is not None else (hi if hi < INF else DEFAULT_GRID_HI)
        glo, ghi = float(glo), float(ghi)
        if not 0 < glo <= ghi < INF:
            raise ValueError(f"log grid needs 0 < grid_lo <= grid_hi < inf, got [{glo}, {ghi}]")
        object.__setattr__(self, "grid_lo", max(glo, lo) if lo > 0 else glo)
        object.__setattr__(self, "grid_hi", min(ghi, hi))

    def contains(self, lam):
        lam = ensure_extended(lam, "lambda")
        if lam == INF:
            return self.includes_infinity
        return self.lo <= lam <= self.hi

    @property
    def sample_grid(self):
        core = np.logspace(math.log10(self.grid_lo), math.log10(self.grid_hi),
                           self.grid_points)
        ends = [self.lo]
        if self.hi < INF:
            ends.append(self.hi)
        grid = np.unique(np.concatenate([core, np.asarray(ends)]))
        if self.includes_infinity:
            grid = np.append(grid, INF)
        return grid


@dataclass(frozen=True)
class FiniteSet:
    """An explicit finite parameter set; values may include the inf sentinel."""

    values: tuple

    def __post_init__(self):
        vals = tuple(sorted(ensure_extended(v, "lambda") for v in self.values))
        if not vals:
            raise ValueError("a finite parameter set cannot be empty")
        if vals[0] < 0:
            raise ValueError("parameters must be nonnegative")
        object.__setattr__(self, "values", vals)

    def contains(self, lam):
        return ensure_extended(lam, "lambda") in self.values

    @property
    def sample_grid(self):
        return np.asarray(self.values)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class QuadraticFamily:
    """phi_lambda = (lambda/2)||.||^2; the ends degenerate to indicators.

    f(0, x, y) is the indicator of y = 0 and f(inf, x, y) the indicator of
    x = 0; member graphs are the lines y = lambda x, whose union is the
    positively-collinear (Cauchy) law.
    """

    dim: int

    def phi(self, lam):
        if lam == INF:
            return IndicatorPoint(np.zeros(self.dim))
        return Quadratic(lam, self.dim)

    def phi_star(self, lam):
        if lam == 0.0:
            return IndicatorPoint(np.zeros(self.dim))
        if lam == INF:
            return Quadratic(0.0, self.dim)
        return Quadratic(1.0 / lam, self.dim)

    def f(self, lam, x, y):
        if lam == 0.0:
            return 0.0 if not np.any(y) else INF
        if lam == INF:
            return 0.0 if not np.any(x) else INF
        return (0.5 * lam) * inner(x, x) + (0.5 * inner(y, y)) / lam

    def f_many(self, lams, x, y):
        nx2 = inner(x, x)
        ny2 = inner(y, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (0.5 * lams) * nx2 + (0.5 * ny2) / lams
        zero = lams == 0.0
        if zero.any():
            out[zero] = 0.0 if ny2 == 0.0 else INF
        top = lams == INF
        if top.any():
            out[top] = 0.0 if nx2 == 0.0 else INF
        return out

    def finite_boundary_lams(self, x, y):
        return []

    def exact_minimizer_lams(self, x, y):
        # the unconstrained minimizer ||y||/||x||, with the ends standing in
        # when an argument vanishes
        nx, ny = norm(x), norm(y)
        if nx == 0.0 and ny == 0.0:
            return []
        if nx == 0.0:
            return [INF]
        if ny == 0.0:
            return [0.0]
        return [ny / nx]

    def candidate(self, lam1, lam2, alpha, y):
        # harmonic interpolation 1/lam = alpha/lam1 + beta/lam2 with the
        # conventions 1/0 = inf and 1/inf = 0
        inv = 0.0
        for lam, wgt in ((lam1, alpha), (lam2, 1.0 - alpha)):
            if wgt == 0.0:
                continue
            if lam == 0.0:
                return 0.0
            if lam < INF:
                inv += wgt / lam
        if inv == 0.0:
            return INF
        return 1.0 / inv

    def candidate_dual(self, lam1, lam2, alpha, x):
        # mirrored rule for mixes in the second argument: y = lambda x makes
        # the arithmetic mean exact, consistent with f(lam,x,y)=f(1/lam,y,x);
        # an infinite member forces x = 0, where every parameter accepts
        if lam1 == INF or lam2 == INF:
            return INF
        return alpha * lam1 + (1.0 - alpha) * lam2


@dataclass(frozen=True)
class NormFamily:
    """phi_lambda = lambda||.||, phi*_lambda the indicator of the lambda-ball.

    Member graphs are the rigid-plastic yielding laws: x = 0 while
    ||y|| < lambda, outward rays once ||y|| = lambda.
    """

    dim: int

    def phi(self, lam):
        if lam == INF:
            return IndicatorPoint(np.zeros(self.dim))
        return ScaledNorm(lam, self.dim)

    def phi_star(self, lam):
        if lam == INF:
            return Quadratic(0.0, self.dim)
        return IndicatorBall(lam, self.dim)

    def f(self, lam, x, y):
        if lam == 0.0:
            return 0.0 if not np.any(y) else INF
        if lam == INF:
            return 0.0 if not np.any(x) else INF
        return lam * norm(x) + (0.0 if norm(y) <= lam else INF)

    def f_many(self, lams, x, y):
        nx = norm(x)
        ny = norm(y)
        with np.errstate(invalid="ignore"):
            out = np.where(ny <= lams, lams * nx, INF)
        top = lams == INF
        if top.any():
            out[top] = 0.0 if nx == 0.0 else INF
        zero = lams == 0.0
        if zero.any():
            out[zero] = 0.0 if ny == 0.0 else INF
        return out

    def finite_boundary_lams(self, x, y):
        # f(., x, y) switches from +inf to finite exactly at lambda = ||y||;
        # a log grid cannot see that edge, so infimum sweeps must add it
        return [norm(y)]

    def exact_minimizer_lams(self, x, y):
        return [norm(y)]

    def candidate(self, lam1, lam2, alpha, y):
        return min(lam1, lam2)

    def candidate_dual(self, lam1, lam2, alpha, x):
        if lam1 == INF or lam2 == INF:
            return INF
        return alpha * lam1 + (1.0 - alpha) * lam2


@dataclass(frozen=True)
class SeparableFamily:
    """A single-member cover {phi}; f is phi(x) + phi*(y) for every lambda."""

    potential: ConvexFunction
    potential_star: ConvexFunction

    @property
    def dim(self):
        return self.potential.dim

    def phi(self, lam):
        return self.potential

    def phi_star(self, lam):
        return self.potential_star

    def f(self, lam, x, y):
        return self.potential.value(x) + self.potential_star.value(y)

    def f_many(self, lams, x, y):
        return np.full(lams.size, self.f(None, x, y))

    def finite_boundary_lams(self, x, y):
        return []

    def exact_minimizer_lams(self, x, y):
        return []

    def candidate(self, lam1, lam2, alpha, y):
        return lam1

    def candidate_dual(self, lam1, lam2, alpha, x):
        return lam1


class TabulatedFamily:
    """Explicit finite table lambda -> (phi_lambda, phi*_lambda).

    Joint lower semicontinuity cannot be certified from a finite table, so
    covers built on one carry lsc_certificate "assumed".
    """

    def __init__(self, entries):
        table = {}
        for lam, phi, phi_star in entries:
            lam = ensure_extended(lam, "lambda")
            if phi.dim != phi_star.dim:
                raise ValueError("phi and phi* must share a dimension")
            table[lam] = (phi, phi_star)
        if not table:
            raise ValueError("a tabulated family needs at least one entry")
        dims = {phi.dim for phi, _ in table.values()}
        if len(dims) != 1:
            raise ValueError("all tabulated members must share a dimension")
        self.table = dict(sorted(table.items()))
        self.dim = dims.pop()

    def lams(self):
        return list(self.table)

    def _entry(self, lam):
        try:
            return self.table[ensure_extended(lam, "lambda")]
        except KeyError:
            raise ValueError(f"lambda {lam} is not tabulated") from None

    def phi(self, lam):
        return self._entry(lam)[0]

    def phi_star(self, lam):
        return self._entry(lam)[1]

    def f(self, lam, x, y):
        phi, phi_star = self._entry(lam)
        return phi.value(x) + phi_star.value(y)

    def f_many(self, lams, x, y):
        return np.array([self.f(lam, x, y) for lam in lams])

    def finite_boundary_lams(self, x, y):
        return []

    def exact_minimizer_lams(self, x, y):
        return []

    def candidate(self, lam1, lam2, alpha, y):
        raise CandidateNotFoundError("tabulated families use the grid scan")

    def candidate_dual(self, lam1, lam2, alpha, x):
        raise CandidateNotFoundError("tabulated families use the grid scan")


# ---------------------------------------------------------------------------
# the cover


def _batch_norm2(vs):
    # same coordinate accumulation order as numerics.inner(v, v)
    out = np.zeros(vs.shape[0])
    for k in range(vs.shape[1]):
        out += vs[:, k] * vs[:, k]
    return out


@dataclass(frozen=True)
class Cover:
    domain: object
    family: object

    @property
    def dim(self):
        return self.family.dim

    @property
    def lsc_certificate(self):
        """"structural" when joint lsc holds by form, "assumed" for tables."""
        return "assumed" if isinstance(self.family, TabulatedFamily) else "structural"

    def f_eval(self, lam, x, y):
        """f(lambda, x, y) = phi_lambda(x) + phi*_lambda(y), exact case split."""
        lam = ensure_extended(lam, "lambda")
        if not self.domain.contains(lam):
            raise ValueError(f"lambda {lam} is outside the parameter domain")
        xv = as_vector(x, self.dim)
        yv = as_vector(y, self.dim)
        return self.family.f(lam, xv, yv)

    def infimum_lams(self, x, y):
        """Parameter values swept by numeric infima at the probe (x, y):
        the sample grid plus the family's finiteness boundaries."""
        grid = self.domain.sample_grid
        extra = [b for b in self.family.finite_boundary_lams(x, y)
                 if self.domain.contains(b) and b not in grid]
        if extra:
            grid = np.sort(np.append(grid, extra))
        return grid

    def grid_infimum(self, x, y):
        """(value, attaining lambda) of f over :meth:`infimum_lams`."""
        xv = as_vector(x, self.dim)
        yv = as_vector(y, self.dim)
        lams = self.infimum_lams(xv, yv)
        vals = self.family.f_many(lams, xv, yv)
        k = int(np.argmin(vals))
        return float(vals[k]), float(lams[k])

    def grid_infimum_values(self, xs, ys):
        """Grid-infimum values over paired probe stacks, entry for entry equal
        to looping :meth:`grid_infimum`. Quadratic families run on the batched
        kernel; other families fall back to the scalar sweep."""
        xs = _as_grid(xs, self.dim)
        ys = _as_grid(ys, self.dim)
        if xs.shape != ys.shape:
            raise ValueError("probe stacks must pair up one x with one y")
        if isinstance(self.family, QuadraticFamily):
            grid = self.domain.sample_grid
            core = np.ascontiguousarray(grid[(grid > 0.0) & (grid < INF)])
            nx2 = _batch_norm2(xs)
            ny2 = _batch_norm2(ys)
            vals, _ = kernels.quadratic_grid_min(nx2, ny2, core)
            if grid.size and grid[0] == 0.0:
                vals = np.minimum(vals, np.where(ny2 == 0.0, 0.0, INF))
            if grid.size and grid[-1] == INF:
                vals = np.minimum(vals, np.where(nx2 == 0.0, 0.0, INF))
            return vals
        return np.array([self.grid_infimum(xs[i], ys[i])[0] for i in range(xs.shape[0])])


def quadratic_cover(dim=1, grid_points=DEFAULT_GRID_POINTS,
                    grid_lo=DEFAULT_GRID_LO, grid_hi=DEFAULT_GRID_HI):
    """The scaled-quadratics cover on [0, inf], ends included."""
    dom = ClosedInterval(0.0, INF, includes_infinity=True, grid_points=grid_points,
                         grid_lo=grid_lo, grid_hi=grid_hi)
    return Cover(dom, QuadraticFamily(dim))


def norm_cover(dim=1, grid_points=DEFAULT_GRID_POINTS,
               grid_lo=DEFAULT_GRID_LO, grid_hi=DEFAULT_GRID_HI):
    """The scaled-norms cover on [0, inf], ends included."""
    dom = ClosedInterval(0.0, INF, includes_infinity=True, grid_points=grid_points,
                         grid_lo=grid_lo, grid_hi=grid_hi)
    return Cover(dom, NormFamily(dim))


def separable_cover(phi, dual_grid=None, primal_grid=None):
    """Single-member cover of M(phi); conjugates analytic forms in closed
    form and sampled forms on the supplied grids."""
    phi_star = conjugate(phi, dual_grid=dual_grid, primal_grid=primal_grid)
    return Cover(FiniteSet((0.0,)), SeparableFamily(phi, phi_star))


def tabulated_cover(entries):
    """Cover from explicit (lambda, phi, phi*) rows."""
    family = TabulatedFamily(entries)
    return Cover(FiniteSet(tuple(family.lams())), family)


# ---------------------------------------------------------------------------
# coverage certification


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    missed_pairs: list
    spurious_pairs: list


def coverage_check(cover, law, tol=GRID_TOL, snap=0.0):
    """Certify union-of-graphs equality against a sampled law.

    A law pair is missed when no swept lambda brings f within tol of the
    pairing. A triple (lambda, x, y) over the sample grid and the law's
    domain x image is spurious when f touches the pairing but (x, y) is not
    in the law (stored pairs, snap-tolerant, or declared slice hints).
    """
    if cover.dim != law.dim:
        raise ValueError(f"cover dimension {cover.dim} != law dimension {law.dim}")
    missed = []
    for x, y in law.pairs:
        val, _ = cover.grid_infimum(x, y)
        if val - inner(x, y) > tol:
            missed.append((x, y))
    spurious = []
    for x in law.domain():
        for y in law.image():
            if law.contains(x, y, snap=snap):
                continue
            pairing = inner(x, y)
            lams = cover.infimum_lams(x, y)
            vals = cover.family.f_many(lams, x, y)
            hit = np.nonzero(vals - pairing <= tol)[0]
            for k in hit:
                spurious.append((float(lams[k]), x, y))
    return CoverageReport(not missed and not spurious, missed, spurious)


# ---------------------------------------------------------------------------
# candidate parameter for implicit-convexity verification


def p1_candidate(cover, lam1, lam2, alpha, x1, x2, y, tol=1e-9):
    """Parameter lambda at which the mixed point alpha*x1 + beta*x2 should be
    a subgradient point of phi*_lambda at y.

    Preconditions: alpha in [0, 1] and x_i in the subdifferential of
    phi*_{lambda_i} at y, checked through the Fenchel equality gap.
    Built-in families use their closed selection rules (harmonic
    interpolation for quadratics, the minimum for norms); tabulated families
    scan their parameters in ascending order.
    """
    if not 0.0 <= alpha <= 1.0:
        raise PreconditionError(f"alpha must be in [0, 1], got {alpha}")
    lam1 = ensure_extended(lam1, "lambda1")
    lam2 = ensure_extended(lam2, "lambda2")
    for name, lam in (("lambda1", lam1), ("lambda2", lam2)):
        if not cover.domain.contains(lam):
            raise PreconditionError(f"{name} = {lam} is outside the parameter domain")
    xv1 = as_vector(x1, cover.dim)
    xv2 = as_vector(x2, cover.dim)
    yv = as_vector(y, cover.dim)
    for name, lam, xv in (("x1", lam1, xv1), ("x2", lam2, xv2)):
        gap = cover.family.f(lam, xv, yv) - inner(xv, yv)
        if not gap <= tol:
            raise PreconditionError(
                f"{name} is not a subgradient point of phi*_lambda at y "
                f"(lambda = {lam}, gap = {gap})")

    mixed = alpha * xv1 + (1.0 - alpha) * xv2
    if isinstance(cover.family, TabulatedFamily):
        for lam in cover.family.lams():
            if cover.family.f(lam, mixed, yv) - inner(mixed, yv) <= tol:
                return lam
        raise CandidateNotFoundError(
            "no tabulated lambda accepts the mixed point as a subgradient point")
    return cover.family.candidate(lam1, lam2, alpha, yv)
