"""File formats: JSON law graphs and covers, CSV probe tables.

JSON has no infinity, so the +inf sentinel travels as the string "inf",
accepted only where the schema allows an extended value (radii, offsets,
sampled values, parameters, interval ends). Coordinates must be finite and
parse rejects NaN/Inf outright. All emission is deterministic: sorted JSON
keys, 12-significant-digit numbers in CSV, fixed row order.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .convex import (
    Affine,
    IndicatorBall,
    IndicatorPoint,
    MaxAffine,
    Quadratic,
    Sampled,
    ScaledNorm,
)
from .covers import (
    ClosedInterval,
    Cover,
    FiniteSet,
    NormFamily,
    QuadraticFamily,
    SeparableFamily,
    TabulatedFamily,
    separable_cover,
    tabulated_cover,
)
from .laws import Ball, HalfLineRay, LawGraph, Segment, Singleton
from .numerics import INF, inner


class FormatError(ValueError):
    """Structurally invalid law, cover, or function document."""


# ---------------------------------------------------------------------------
# extended-value sentinels


def dump_extended(v):
    """A float for JSON, +inf as the string sentinel."""
    v = float(v)
    return "inf" if v == INF else v


def parse_extended(v, what):
    """Accept a finite number or the "inf" sentinel."""
    if v == "inf":
        return INF
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"{what} must be a number or \"inf\", got {v!r}")
    out = float(v)
    if out != out or out in (INF, -INF):
        raise FormatError(f"{what} must be finite or the \"inf\" sentinel, got {v!r}")
    return out


def parse_finite(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"{what} must be a number, got {v!r}")
    out = float(v)
    if not np.isfinite(out):
        raise FormatError(f"{what} must be finite, got {v!r}")
    return out


def _parse_vector(v, what, dim=None):
    if not isinstance(v, (list, tuple)) or not v:
        raise FormatError(f"{what} must be a nonempty list of numbers")
    out = np.array([parse_finite(c, f"{what} coordinate") for c in v])
    if dim is not None and out.size != dim:
        raise FormatError(f"{what} has {out.size} coordinates, expected {dim}")
    return out


# ---------------------------------------------------------------------------
# law graphs


_HINT_SHAPES = {"singleton", "segment", "ball", "ray"}


def _hint_to_data(hint):
    if isinstance(hint, Singleton):
        return {"shape": "singleton", "params": {"point": list(hint.point)}}
    if isinstance(hint, Segment):
        return {"shape": "segment", "params": {"a": list(hint.a), "b": list(hint.b)}}
    if isinstance(hint, Ball):
        return {"shape": "ball", "params": {"center": list(hint.center),
                                            "radius": dump_extended(hint.radius)}}
    if isinstance(hint, HalfLineRay):
        return {"shape": "ray", "params": {"origin": list(hint.origin),
                                           "direction": list(hint.direction)}}
    raise FormatError(f"unknown hint shape {type(hint).__name__}")


def _hint_from_data(data, dim):
    shape = data.get("shape")
    if shape not in _HINT_SHAPES:
        raise FormatError(f"hint shape must be one of {sorted(_HINT_SHAPES)}, got {shape!r}")
    params = data.get("params")
    if not isinstance(params, dict):
        raise FormatError("hint needs a params object")
    if shape == "singleton":
        return Singleton(_parse_vector(params.get("point"), "singleton point", dim))
    if shape == "segment":
        return Segment(_parse_vector(params.get("a"), "segment end a", dim),
                       _parse_vector(params.get("b"), "segment end b", dim))
    if shape == "ball":
        return Ball(_parse_vector(params.get("center"), "ball center", dim),
                    parse_extended(params.get("radius"), "ball radius"))
    return HalfLineRay(_parse_vector(params.get("origin"), "ray origin", dim),
                       _parse_vector(params.get("direction"), "ray direction", dim))


def law_to_data(law, snap_tolerance=None):
    """LawGraphFile document for a law graph."""
    data = {
        "dimension": law.dim,
        "pairs": [[list(x), list(y)] for x, y in law.pairs],
    }
    hints = []
    for key, hint in law.primal_hints.items():
        hints.append({"at": list(key), "side": "primal", **_hint_to_data(hint)})
    for key, hint in law.dual_hints.items():
        hints.append({"at": list(key), "side": "dual", **_hint_to_data(hint)})
    if hints:
        data["slice_hints"] = hints
    if snap_tolerance:
        data["snap_tolerance"] = float(snap_tolerance)
    return data


def law_from_data(data):
    """Law graph from a LawGraphFile document.

    A positive snap_tolerance quantizes every coordinate to its grid before
    slicing, so laws sampled with floating noise form exact slices; hint
    anchors are quantized the same way.
    """
    if not isinstance(data, dict):
        raise FormatError("a law file must be a JSON object")
    dim = data.get("dimension")
    if not isinstance(dim, int) or not 1 <= dim <= 3:
        raise FormatError(f"dimension must be an integer in [1, 3], got {dim!r}")
    raw = data.get("pairs")
    if not isinstance(raw, list) or not raw:
        raise FormatError("pairs must be a nonempty list")
    snap = data.get("snap_tolerance", 0.0)
    snap = parse_finite(snap, "snap_tolerance")
    if snap < 0:
        raise FormatError(f"snap_tolerance must be nonnegative, got {snap}")

    def q(v):
        return np.round(v / snap) * snap if snap > 0.0 else v

    pairs = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise FormatError(f"pair {k} must be [[x...], [y...]]")
        x = q(_parse_vector(entry[0], f"pair {k} x", dim))
        y = q(_parse_vector(entry[1], f"pair {k} y", dim))
        pairs.append((x, y))

    primal_hints, dual_hints = {}, {}
    for k, h in enumerate(data.get("slice_hints", [])):
        if not isinstance(h, dict):
            raise FormatError(f"slice hint {k} must be an object")
        side = h.get("side", "primal")
        if side not in ("primal", "dual"):
            raise FormatError(f"slice hint side must be primal or dual, got {side!r}")
        at = q(_parse_vector(h.get("at"), f"slice hint {k} anchor", dim))
        hint = _hint_from_data(h, dim)
        (primal_hints if side == "primal" else dual_hints)[tuple(at)] = hint
    return LawGraph(pairs, primal_hints=primal_hints, dual_hints=dual_hints)


def load_law(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from exc
    return law_from_data(data)


def save_law(law, path, snap_tolerance=None):
    with open(path, "w") as fh:
        fh.write(dumps(law_to_data(law, snap_tolerance)))
        fh.write("\n")


# ---------------------------------------------------------------------------
# convex function descriptors


def function_to_data(phi):
    if isinstance(phi, Quadratic):
        return {"form": "quadratic", "scale": phi.scale, "dimension": phi.dim}
    if isinstance(phi, ScaledNorm):
        return {"form": "scaled-norm", "scale": phi.scale, "dimension": phi.dim}
    if isinstance(phi, IndicatorBall):
        return {"form": "indicator-ball", "radius": dump_extended(phi.radius),
                "dimension": phi.dim}
    if isinstance(phi, IndicatorPoint):
        return {"form": "indicator-point", "point": list(phi.point),
                "offset": float(phi.offset)}
    if isinstance(phi, Affine):
        return {"form": "affine", "slope": list(phi.slope), "offset": float(phi.offset)}
    if isinstance(phi, MaxAffine):
        return {"form": "max-affine",
                "pieces": [{"slope": list(s), "offset": float(o)}
                           for s, o in phi.pieces]}
    if isinstance(phi, Sampled):
        return {"form": "sampled",
                "grid": [list(g) for g in phi.grid],
                "values": [dump_extended(v) for v in phi.values]}
    raise FormatError(f"cannot serialize {type(phi).__name__}")


def function_from_data(data):
    if not isinstance(data, dict):
        raise FormatError("a function descriptor must be a JSON object")
    form = data.get("form")
    if form == "quadratic":
        return Quadratic(parse_finite(data.get("scale"), "scale"),
                         int(data.get("dimension", 1)))
    if form == "scaled-norm":
        return ScaledNorm(parse_finite(data.get("scale"), "scale"),
                          int(data.get("dimension", 1)))
    if form == "indicator-ball":
        return IndicatorBall(parse_extended(data.get("radius"), "radius"),
                             int(data.get("dimension", 1)))
    if form == "indicator-point":
        return IndicatorPoint(_parse_vector(data.get("point"), "point"),
                              parse_finite(data.get("offset", 0.0), "offset"))
    if form == "affine":
        return Affine(_parse_vector(data.get("slope"), "slope"),
                      parse_finite(data.get("offset", 0.0), "offset"))
    if form == "max-affine":
        pieces = data.get("pieces")
        if not isinstance(pieces, list) or not pieces:
            raise FormatError("max-affine needs a nonempty pieces list")
        parsed = [(_parse_vector(p.get("slope"), "piece slope"),
                   parse_finite(p.get("offset", 0.0), "piece offset"))
                  for p in pieces]
        return MaxAffine.from_pieces(parsed)
    if form == "sampled":
        grid = data.get("grid")
        if not isinstance(grid, list) or not grid:
            raise FormatError("sampled needs a nonempty grid")
        nodes = np.array([_parse_vector(g, "grid node") for g in grid])
        values = np.array([parse_extended(v, "sampled value")
                           for v in data.get("values", [])])
        return Sampled(nodes, values)
    raise FormatError(f"unknown function form {form!r}")


# ---------------------------------------------------------------------------
# covers


def cover_to_data(cover):
    """CoverFile document for a cover."""
    fam = cover.family
    if isinstance(fam, (QuadraticFamily, NormFamily)):
        dom = cover.domain
        return {
            "family": "quadratic" if isinstance(fam, QuadraticFamily) else "norm",
            "dimension": fam.dim,
            "lambda_domain": {
                "lo": dump_extended(dom.lo),
                "hi": dump_extended(dom.hi),
                "includes_infinity": dom.includes_infinity,
                "grid_points": dom.grid_points,
            },
        }
    if isinstance(fam, SeparableFamily):
        data = {"family": "separable", "potential": function_to_data(fam.potential)}
        if isinstance(fam.potential, (Sampled, MaxAffine)):
            data["conjugate"] = function_to_data(fam.potential_star)
        return data
    if isinstance(fam, TabulatedFamily):
        return {
            "family": "tabulated",
            "entries": [{"lambda": dump_extended(lam),
                         "potential": function_to_data(phi),
                         "conjugate": function_to_data(star)}
                        for lam, (phi, star) in fam.table.items()],
        }
    raise FormatError(f"cannot serialize a cover over {type(fam).__name__}")


def cover_from_data(data):
    if not isinstance(data, dict):
        raise FormatError("a cover file must be a JSON object")
    family = data.get("family")
    if family in ("quadratic", "norm"):
        dom_data = data.get("lambda_domain")
        if not isinstance(dom_data, dict):
            raise FormatError("quadratic and norm covers need a lambda_domain object")
        lo = parse_extended(dom_data.get("lo", 0.0), "lambda_domain.lo")
        hi = parse_extended(dom_data.get("hi", "inf"), "lambda_domain.hi")
        grid_points = dom_data.get("grid_points", 512)
        if isinstance(grid_points, bool) or not isinstance(grid_points, int):
            raise FormatError("lambda_domain.grid_points must be an integer")
        include_inf = dom_data.get("includes_infinity", hi == INF)
        try:
            dom = ClosedInterval(lo, hi, includes_infinity=bool(include_inf),
                                 grid_points=grid_points)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        dim = data.get("dimension", 1)
        if isinstance(dim, bool) or not isinstance(dim, int) or not 1 <= dim <= 3:
            raise FormatError(f"dimension must be an integer in [1, 3], got {dim!r}")
        fam = QuadraticFamily(dim) if family == "quadratic" else NormFamily(dim)
        return Cover(dom, fam)
    if family == "separable":
        phi = function_from_data(data.get("potential"))
        dual_grid = data.get("dual_grid")
        primal_grid = data.get("primal_grid")
        if dual_grid is not None:
            dual_grid = np.array([_parse_vector(g, "dual grid node")
                                  for g in dual_grid])
        if primal_grid is not None:
            primal_grid = np.array([_parse_vector(g, "primal grid node")
                                    for g in primal_grid])
        conj = data.get("conjugate")
        if conj is not None:
            fam = SeparableFamily(phi, function_from_data(conj))
            return Cover(FiniteSet((0.0,)), fam)
        try:
            return separable_cover(phi, dual_grid=dual_grid, primal_grid=primal_grid)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if family == "tabulated":
        entries = data.get("entries")
        if not isinstance(entries, list) or not entries:
            raise FormatError("a tabulated cover needs a nonempty entries list")
        rows = []
        for k, e in enumerate(entries):
            if not isinstance(e, dict):
                raise FormatError(f"entry {k} must be an object")
            rows.append((parse_extended(e.get("lambda"), f"entry {k} lambda"),
                         function_from_data(e.get("potential")),
                         function_from_data(e.get("conjugate"))))
        try:
            return tabulated_cover(rows)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    raise FormatError(
        f"family must be quadratic, norm, separable or tabulated, got {family!r}")


def load_cover(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from exc
    return cover_from_data(data)


def save_cover(cover, path):
    with open(path, "w") as fh:
        fh.write(dumps(cover_to_data(cover)))
        fh.write("\n")


# ---------------------------------------------------------------------------
# deterministic emission


def dumps(data):
    """Canonical JSON: sorted keys, two-space indent."""
    return json.dumps(data, indent=2, sort_keys=True)


def fmt(v):
    """12-significant-digit decimal; +inf prints as inf, -0 normalizes to 0."""
    v = float(v)
    if v == 0.0:
        v = 0.0
    return f"{v:.12g}"


def csv_header(dim):
    if dim == 1:
        return "x,y,b,pairing"
    xs = ",".join(f"x{k + 1}" for k in range(dim))
    ys = ",".join(f"y{k + 1}" for k in range(dim))
    return f"{xs},{ys},b,pairing"


def probe_rows(b, x_probes, y_probes):
    """CSV lines (no header) of b over the probe product, lexicographic in
    (x, y); probes are iterated in the given order, so pass sorted stacks."""
    lines = []
    for x in x_probes:
        for y in y_probes:
            coords = [fmt(c) for c in x] + [fmt(c) for c in y]
            lines.append(",".join(coords + [fmt(b.value(x, y)),
                                            fmt(inner(x, y))]))
    return lines


def to_jsonable(obj):
    """Recursive JSON conversion for reports: dataclasses to objects, arrays
    to lists, non-finite floats to sentinels."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if v == INF:
            return "inf"
        if v == -INF:
            return "-inf"
        if v != v:
            return "nan"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)
