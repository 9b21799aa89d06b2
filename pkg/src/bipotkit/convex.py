"""Closed convex functions on R^n (n <= 3) and their Fenchel machinery.

The form taxonomy is closed under the analytic conjugation table below;
max-affine and sampled forms conjugate through a discrete sup on explicit
grids. Subdifferential membership is always decided through the Fenchel
equality gap phi(x) + phi*(y) - <x, y>, never through difference quotients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .numerics import (
    INF,
    DimensionMismatchError,
    MinusInfinityError,
    NegativeFenchelGapError,
    as_vector,
    ensure_extended,
    ensure_finite,
    inner,
    norm,
)

ANALYTIC_TOL = 1e-9
SAMPLED_TOL = 1e-6


class ConjugateDomainError(ValueError):
    """Conjugation failed: empty effective domain or missing grid."""


def _check_dim(dim):
    d = int(dim)
    if not 1 <= d <= 3:
        raise ValueError(f"dimension must be 1, 2 or 3, got {dim}")
    return d


class ConvexFunction:
    """Base class; subclasses implement ``value`` on validated vectors."""

    def __call__(self, x):
        return self.value(as_vector(x, self.dim))

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Quadratic(ConvexFunction):
    """x -> (scale/2) * ||x||^2 with scale >= 0; scale 0 is the zero function."""

    scale: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "scale", ensure_finite(self.scale, "scale"))
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if self.scale < 0:
            raise ValueError(f"scale must be nonnegative, got {self.scale}")

    def value(self, x):
        return (0.5 * self.scale) * inner(x, x)

    def _key(self):
        return (self.scale, self.dim)


@dataclass(frozen=True, eq=False)
class ScaledNorm(ConvexFunction):
    """x -> scale * ||x|| with scale >= 0."""

    scale: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "scale", ensure_finite(self.scale, "scale"))
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if self.scale < 0:
            raise ValueError(f"scale must be nonnegative, got {self.scale}")

    def value(self, x):
        return self.scale * norm(x)

    def _key(self):
        return (self.scale, self.dim)


@dataclass(frozen=True, eq=False)
class IndicatorBall(ConvexFunction):
    """Indicator of the closed ball of given radius; radius may be +inf."""

    radius: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "radius", ensure_extended(self.radius, "radius"))
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if self.radius < 0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")

    def value(self, x):
        return 0.0 if norm(x) <= self.radius else INF

    def _key(self):
        return (self.radius, self.dim)


@dataclass(frozen=True, eq=False)
class IndicatorPoint(ConvexFunction):
    """Indicator of a single point, offset by a finite constant there.

    The offset exists so the taxonomy is closed under conjugation:
    Affine(a, c)* = IndicatorPoint(a, offset=-c).
    """

    point: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point))
        object.__setattr__(self, "offset", ensure_finite(self.offset, "offset"))

    @property
    def dim(self):
        return self.point.size

    def value(self, x):
        return self.offset if bool(np.all(x == self.point)) else INF

    def _key(self):
        return (tuple(self.point), self.offset)


@dataclass(frozen=True, eq=False)
class Affine(ConvexFunction):
    """x -> <slope, x> + offset."""

    slope: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "slope", as_vector(self.slope))
        object.__setattr__(self, "offset", ensure_finite(self.offset, "offset"))

    @property
    def dim(self):
        return self.slope.size

    def value(self, x):
        return inner(self.slope, x) + self.offset

    def _key(self):
        return (tuple(self.slope), self.offset)


@dataclass(frozen=True, eq=False)
class MaxAffine(ConvexFunction):
    """Pointwise max of finitely many affine pieces (slope, offset)."""

    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        slopes = np.atleast_2d(np.asarray(self.slopes, dtype=np.float64))
        offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        if slopes.shape[0] == 0:
            raise ValueError("a max-affine function needs at least one piece")
        if slopes.shape[0] != offsets.size:
            raise ValueError("slopes and offsets disagree in piece count")
        if not (np.all(np.isfinite(slopes)) and np.all(np.isfinite(offsets))):
            raise ValueError("max-affine pieces must be finite")
        _check_dim(slopes.shape[1])
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def from_pieces(cls, pieces):
        """Build from an iterable of (slope, offset) pairs."""
        slopes = [as_vector(s) for s, _ in pieces]
        offsets = [o for _, o in pieces]
        return cls(np.array(slopes), np.array(offsets))

    @property
    def dim(self):
        return self.slopes.shape[1]

    @property
    def pieces(self):
        return [(self.slopes[i].copy(), float(self.offsets[i])) for i in range(self.offsets.size)]

    def value(self, x):
        best = -INF
        for i in range(self.offsets.size):
            v = inner(self.slopes[i], x) + self.offsets[i]
            if v > best:
                best = v
        return best

    def _key(self):
        return (tuple(map(tuple, self.slopes)), tuple(self.offsets))


@dataclass(frozen=True, eq=False)
class Sampled(ConvexFunction):
    """Finite samples (grid node -> extended value); +inf off the grid.

    In one dimension the grid must be strictly increasing.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.ndim == 1:
            grid = grid[:, None]
        if grid.ndim != 2 or grid.shape[0] == 0:
            raise ValueError("grid must be a nonempty stack of vectors")
        _check_dim(grid.shape[1])
        if not np.all(np.isfinite(grid)):
            raise ValueError("grid nodes must be finite")
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size != grid.shape[0]:
            raise ValueError("values and grid disagree in length")
        for v in values:
            ensure_extended(v, "sampled value")
        if grid.shape[1] == 1 and grid.shape[0] > 1:
            if not np.all(np.diff(grid[:, 0]) > 0):
                raise ValueError("a 1-d grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def dim(self):
        return self.grid.shape[1]

    def value(self, x):
        hit = np.nonzero(np.all(self.grid == x, axis=1))[0]
        if hit.size:
            return float(self.values[hit[0]])
        return INF

    def _key(self):
        return (tuple(map(tuple, self.grid)), tuple(self.values))


ANALYTIC_FORMS = (Quadratic, ScaledNorm, IndicatorBall, IndicatorPoint, Affine)


def evaluate(phi, x):
    """Extended value of phi at x; never -inf."""
    return phi(x)


def _as_grid(grid, dim=None):
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim == 1:
        g = g[:, None]
    if g.ndim != 2 or g.shape[0] == 0:
        raise ValueError("a grid must be a nonempty stack of vectors")
    if not np.all(np.isfinite(g)):
        raise ValueError("grid nodes must be finite")
    if dim is not None and g.shape[1] != dim:
        raise DimensionMismatchError(f"grid dimension {g.shape[1]} != expected {dim}")
    return g


def discrete_conjugate_values(grid, values, dual_grid, method="auto"):
    """Values of the discrete conjugate sup_i (<x_i, y> - v_i) on dual_grid.

    ``method`` is "bruteforce", "merge" (1-d, both grids ascending) or "auto",
    which picks the linear-time merge when it applies. Raises if every sample
    is +inf (the sup would be -inf).
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim == 1:
        grid = grid[:, None]
    dual = _as_grid(dual_grid, grid.shape[1])
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    finite = values < INF
    if not finite.any():
        raise ConjugateDomainError("conjugate of an everywhere-infinite function is -inf")

    one_d = grid.shape[1] == 1
    dual_sorted = one_d and (dual.shape[0] < 2 or bool(np.all(np.diff(dual[:, 0]) >= 0)))
    if method == "auto":
        method = "merge" if (one_d and dual_sorted) else "bruteforce"
    if method == "merge":
        if not (one_d and dual_sorted):
            raise ValueError("merge path needs 1-d samples and an ascending dual grid")
        xf = grid[finite, 0]
        vf = values[finite]
        order = np.argsort(xf, kind="stable")
        return kernels.conjugate_merge(np.ascontiguousarray(xf[order]),
                                       np.ascontiguousarray(vf[order]),
                                       np.ascontiguousarray(dual[:, 0]))
    if method != "bruteforce":
        raise ValueError(f"unknown conjugation method {method!r}")
    pairings = kernels.pairing_matrix(np.ascontiguousarray(grid), np.ascontiguousarray(dual))
    out = kernels.conjugate_bruteforce(pairings, values)
    if np.any(out == -INF):
        raise ConjugateDomainError("conjugate of an everywhere-infinite function is -inf")
    return out


def conjugate(phi, dual_grid=None, primal_grid=None, method="auto"):
    """Fenchel conjugate of phi.

    Analytic forms map through the closed table. Sampled forms need a
    ``dual_grid``; max-affine forms additionally need a ``primal_grid`` to
    sample on before the discrete sup. Discrete results come back as
    :class:`Sampled` on the dual grid.
    """
    if isinstance(phi, Quadratic):
        if phi.scale > 0:
            return Quadratic(1.0 / phi.scale, phi.dim)
        return IndicatorPoint(np.zeros(phi.dim))
    if isinstance(phi, ScaledNorm):
        return IndicatorBall(phi.scale, phi.dim)
    if isinstance(phi, IndicatorBall):
        if phi.radius == INF:
            return IndicatorPoint(np.zeros(phi.dim))
        return ScaledNorm(phi.radius, phi.dim)
    if isinstance(phi, IndicatorPoint):
        if bool(np.all(phi.point == 0.0)) and phi.offset == 0.0:
            return Quadratic(0.0, phi.dim)
        return Affine(phi.point, -phi.offset)
    if isinstance(phi, Affine):
        return IndicatorPoint(phi.slope, -phi.offset)
    if isinstance(phi, Sampled):
        if dual_grid is None:
            raise ConjugateDomainError("conjugating a sampled form needs a dual grid")
        vals = discrete_conjugate_values(phi.grid, phi.values, dual_grid, method=method)
        return Sampled(_as_grid(dual_grid, phi.dim), vals)
    if isinstance(phi, MaxAffine):
        if dual_grid is None or primal_grid is None:
            raise ConjugateDomainError(
                "conjugating a max-affine form needs a primal grid to sample on and a dual grid")
        pg = _as_grid(primal_grid, phi.dim)
        vals = np.array([phi.value(pg[i]) for i in range(pg.shape[0])])
        cvals = discrete_conjugate_values(pg, vals, dual_grid, method=method)
        return Sampled(_as_grid(dual_grid, phi.dim), cvals)
    raise TypeError(f"cannot conjugate {type(phi).__name__}")


def default_tol(phi):
    """1e-9 for analytic forms, 1e-6 for sampled grids."""
    return SAMPLED_TOL if isinstance(phi, Sampled) else ANALYTIC_TOL


@dataclass(frozen=True)
class FenchelGapReport:
    """Outcome of one Fenchel-Young inequality evaluation."""

    gap: float
    at_equality: bool
    tol: float = field(default=ANALYTIC_TOL, compare=False)


def _conjugate_value_at(phi, y, primal_grid):
    """phi*(y) for a single dual point."""
    if isinstance(phi, ANALYTIC_FORMS):
        return conjugate(phi)(y)
    if isinstance(phi, Sampled):
        # exact: the sup over the sample grid is the conjugate of a sampled form
        return float(discrete_conjugate_values(phi.grid, phi.values, [y])[0])
    if isinstance(phi, MaxAffine):
        if primal_grid is None:
            raise ConjugateDomainError(
                "fenchel_gap for a max-affine form needs primal_grid (the sup is sampled there)")
        pg = _as_grid(primal_grid, phi.dim)
        vals = np.array([phi.value(pg[i]) for i in range(pg.shape[0])])
        return float(discrete_conjugate_values(pg, vals, [y])[0])
    raise TypeError(f"cannot conjugate {type(phi).__name__}")


def fenchel_gap(phi, x, y, tol=None, primal_grid=None):
    """Report the gap phi(x) + phi*(y) - <x, y> at one primal-dual probe.

    The gap is nonnegative up to rounding; a value below -tol means the
    conjugate implementation is inconsistent and raises. For max-affine
    forms the conjugate is sampled on ``primal_grid``, which bounds the true
    gap from below; it is exact whenever the sup is attained on that grid.
    """
    if tol is None:
        tol = default_tol(phi)
    xv = as_vector(x, phi.dim)
    yv = as_vector(y, phi.dim)
    px = phi.value(xv)
    py = _conjugate_value_at(phi, yv, primal_grid)
    ensure_extended(py, "conjugate value")
    pairing = inner(xv, yv)
    gap = px + py - pairing
    if math.isnan(gap):
        raise MinusInfinityError("fenchel gap is undefined (inf - inf)")
    if gap < -tol:
        raise NegativeFenchelGapError(
            f"fenchel gap {gap} < -{tol}; conjugate inconsistency for {type(phi).__name__}")
    return FenchelGapReport(gap=gap, at_equality=bool(gap <= tol), tol=tol)


def subdifferential_contains(phi, x, y, tol=None, primal_grid=None):
    """True iff y is a subgradient of phi at x, by the equality criterion."""
    return fenchel_gap(phi, x, y, tol=tol, primal_grid=primal_grid).at_equality


def graph_of(phi, x_grid, y_grid, tol=None):
    """Law graph of phi sampled on a product grid.

    Collects the pairs (x, y) from x_grid x y_grid whose Fenchel gap is at
    most tol. Max-affine forms use x_grid as the sampling window for their
    conjugate. Raises if no pair is in contact (a law graph cannot be empty).
    """
    from .laws import LawGraph

    if tol is None:
        tol = default_tol(phi)
    xg = _as_grid(x_grid, phi.dim)
    yg = _as_grid(y_grid, phi.dim)

    phi_vals = np.array([phi.value(xg[i]) for i in range(xg.shape[0])])
    if isinstance(phi, ANALYTIC_FORMS):
        star = conjugate(phi)
        conj_vals = np.array([star.value(yg[j]) for j in range(yg.shape[0])])
    elif isinstance(phi, Sampled):
        conj_vals = discrete_conjugate_values(phi.grid, phi.values, yg)
    elif isinstance(phi, MaxAffine):
        conj_vals = discrete_conjugate_values(xg, phi_vals, yg)
    else:
        raise TypeError(f"cannot conjugate {type(phi).__name__}")

    pairings = kernels.pairing_matrix(np.ascontiguousarray(xg), np.ascontiguousarray(yg))
    with np.errstate(invalid="ignore"):
        gaps = phi_vals[:, None] + conj_vals[None, :] - pairings
    pairs = [(xg[i].copy(), yg[j].copy())
             for i in range(xg.shape[0]) for j in range(yg.shape[0])
             if gaps[i, j] <= tol]
    if not pairs:
        raise ValueError("no pair of the probe grid is in Fenchel equality; "
                         "a law graph cannot be empty")
    return LawGraph(pairs)
