"""Polygon booleans, line clipping and 1D segment-set algebra (shapely-backed)."""

from __future__ import annotations

import numpy as np
from shapely.geometry import LineString, Point
from shapely.ops import linemerge, unary_union

from flatpack.exceptions import CollinearityError, DisjointUnionError
from flatpack.geometry.base import (
    EPS_ANGLE,
    EPS_LEN,
    EPS_PLANE,
    Line2,
    Polygon2,
    Segment2,
)

Interval = tuple[float, float]


def polygon_union(a: Polygon2, b: Polygon2) -> Polygon2:
    """Union of two overlapping or boundary-touching polygons.

    Raises:
        DisjointUnionError: If the regions do not form one connected polygon.
    """
    merged = unary_union([a.to_shapely(), b.to_shapely()])
    if merged.geom_type != "Polygon":
        raise DisjointUnionError(
            f"Union of disjoint regions produced a {merged.geom_type}"
        )
    return Polygon2.from_shapely(merged.simplify(0.0))


def can_merge(a: Polygon2, b: Polygon2) -> bool:
    """True when the regions overlap or share a boundary piece of positive length.

    Regions that meet in isolated points only do not form one polygon and
    stay apart.
    """
    sa, sb = a.to_shapely(), b.to_shapely()
    if sa.distance(sb) > EPS_PLANE:
        return False
    return unary_union([sa, sb]).geom_type == "Polygon"


def _line_extent(line: Line2, poly: Polygon2) -> float:
    minx, miny, maxx, maxy = poly.bounds
    corners = np.array([[minx, miny], [maxx, miny], [maxx, maxy], [minx, maxy]])
    reach = np.max(np.linalg.norm(corners - np.asarray(line.point), axis=1))
    return float(reach) + 1.0


def clip_intervals(line: Line2, poly: Polygon2) -> list[Interval]:
    """Parameter intervals of ``line`` inside the closed polygon region."""
    reach = _line_extent(line, poly)
    carrier = LineString([tuple(line.at(-reach)), tuple(line.at(reach))])
    clipped = carrier.intersection(poly.to_shapely())
    pieces = []
    if clipped.is_empty:
        return []
    if clipped.geom_type in ("MultiLineString", "GeometryCollection"):
        lines = [g for g in clipped.geoms if g.geom_type == "LineString"]
        if not lines:
            return []
        merged = linemerge(lines)
        lines = list(merged.geoms) if merged.geom_type == "MultiLineString" else [merged]
    elif clipped.geom_type == "LineString":
        lines = [clipped]
    else:
        return []
    for piece in lines:
        coords = list(piece.coords)
        t0 = line.parameter(coords[0])
        t1 = line.parameter(coords[-1])
        pieces.append((min(t0, t1), max(t0, t1)))
    return _normalize(pieces)


def _normalize(intervals: list[Interval]) -> list[Interval]:
    """Sort, merge touching intervals and drop zero-length ones."""
    out: list[Interval] = []
    for t0, t1 in sorted(intervals):
        if t1 - t0 <= EPS_LEN:
            continue
        if out and t0 <= out[-1][1] + EPS_LEN:
            out[-1] = (out[-1][0], max(out[-1][1], t1))
        else:
            out.append((t0, t1))
    return out


def clip_line_to_polygon(line: Line2, poly: Polygon2) -> list[Segment2]:
    """Maximal segments of line and closed polygon region, ordered along the line."""
    return [
        Segment2(tuple(line.at(t0)), tuple(line.at(t1)))
        for t0, t1 in clip_intervals(line, poly)
    ]


def interval_intersection(sa: list[Interval], sb: list[Interval]) -> list[Interval]:
    """Maximal intervals of the 1D set intersection (two-pointer sweep)."""
    a, b = _normalize(sa), _normalize(sb)
    out: list[Interval] = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi - lo > EPS_LEN:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return _normalize(out)


def segment_set_intersection(
    sa: list[Segment2], sb: list[Segment2]
) -> list[Segment2]:
    """Intersect two sets of segments lying on one carrier line.

    Raises:
        CollinearityError: If any segment leaves the carrier of the first one.
    """
    segments = [*sa, *sb]
    if not segments:
        return []
    ref = segments[0]
    carrier = Line2(ref.a, tuple(ref.direction))
    normal = np.array([-carrier.direction[1], carrier.direction[0]])
    for seg in segments:
        cross = abs(float(np.cross(ref.direction, seg.direction)))
        offset = abs(float(np.dot(np.asarray(seg.a) - np.asarray(ref.a), normal)))
        if cross > EPS_ANGLE * max(1.0, seg.length) or offset > EPS_PLANE:
            raise CollinearityError(f"Segment {seg.a} -> {seg.b} is off the carrier")

    def to_intervals(segs: list[Segment2]) -> list[Interval]:
        out = []
        for s in segs:
            t0, t1 = carrier.parameter(s.a), carrier.parameter(s.b)
            out.append((min(t0, t1), max(t0, t1)))
        return out

    return [
        Segment2(tuple(carrier.at(t0)), tuple(carrier.at(t1)))
        for t0, t1 in interval_intersection(to_intervals(sa), to_intervals(sb))
    ]


def on_boundary(poly: Polygon2, point, eps: float = EPS_PLANE) -> bool:
    return poly.to_shapely().boundary.distance(Point(point)) <= eps


def segment_on_boundary(poly: Polygon2, seg: Segment2, eps: float = EPS_PLANE) -> bool:
    """Both endpoints and the midpoint lie on the polygon boundary."""
    boundary = poly.to_shapely().boundary
    return all(
        boundary.distance(Point(p)) <= eps for p in (seg.a, seg.b, seg.midpoint)
    )
