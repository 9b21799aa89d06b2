"""Extended-real scalars, small fixed-dimension vectors, shared exceptions.

Values live in R union {+inf}. Plain floats carry the arithmetic; +inf is
absorbing under addition and max, which IEEE semantics already provide. The
one thing IEEE does not forbid is -inf, so every ingestion point goes through
:func:`ensure_extended` and anything that could silently produce -inf or nan
raises instead.
"""

from __future__ import annotations

import math

import numpy as np

INF = math.inf

MAX_DIM = 3


class DimensionMismatchError(ValueError):
    """Vectors of different fixed dimensions met in one operation."""


class MinusInfinityError(ArithmeticError):
    """A computation produced -inf or nan, which the extended scale excludes."""


class NegativeFenchelGapError(RuntimeError):
    """A Fenchel gap came out below -tol; a conjugate implementation bug."""


def ensure_extended(value, what="value"):
    """Validate a scalar as a member of R union {+inf} and return it as float.

    -inf and nan are rejected; they have no meaning on this scale.
    """
    v = float(value)
    if math.isnan(v) or v == -INF:
        raise MinusInfinityError(f"{what} is {v}; only finite values and +inf are allowed")
    return v


def ensure_finite(value, what="value"):
    """Validate a scalar as finite and return it as float."""
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"{what} must be finite, got {v}")
    return v


def as_vector(x, dim=None):
    """Coerce ``x`` to a 1-d float64 array of dimension 1..3 with finite coords.

    If ``dim`` is given, the result must have exactly that many components.
    """
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"a vector must be one-dimensional, got shape {v.shape}")
    if not 1 <= v.size <= MAX_DIM:
        raise ValueError(f"vector dimension must be between 1 and {MAX_DIM}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector coordinates must be finite, got {v.tolist()}")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


def inner(x, y):
    """Duality pairing <x, y> = sum_i x_i y_i of two same-dimension vectors."""
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != yv.size:
        raise DimensionMismatchError(f"pairing needs equal dimensions, got {xv.size} and {yv.size}")
    # Accumulate coordinate by coordinate so every caller (and both kernel
    # backends) produces bit-identical pairings.
    s = 0.0
    for k in range(xv.size):
        s += xv[k] * yv[k]
    return s


def norm(x):
    """Euclidean norm, computed as sqrt(<x, x>) for cross-module consistency."""
    return math.sqrt(inner(x, x))


def vec_key(x):
    """Hashable exact-coordinate key for dictionaries of vectors."""
    v = as_vector(x)
    return tuple(float(c) for c in v)
