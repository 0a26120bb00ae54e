"""Shared tolerances and value types of the geometry kernel.

All lengths are millimeters. Every predicate in the kernel takes its
tolerance from the constants below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from shapely.geometry import LinearRing
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.polygon import orient

from flatpack.exceptions import DegenerateGeometryError

EPS_PLANE = 1e-6  # coplanarity and point-on-plane, mm
EPS_LEN = 1e-6  # degenerate segment length, mm
EPS_ANGLE = 1e-9  # |n1 x n2| parallelism and rotation orthonormality

Point2 = tuple[float, float]


def _ring_tuple(coords) -> tuple[Point2, ...]:
    pts = [(float(x), float(y)) for x, y in coords]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    return tuple(pts)


@dataclass(frozen=True)
class Polygon2:
    """Planar polygon: counter-clockwise outer ring, clockwise holes.

    Construct through from_rings() or from_shapely(), which normalize the
    orientation and reject degenerate or self-intersecting rings.
    """

    outer: tuple[Point2, ...]
    holes: tuple[tuple[Point2, ...], ...] = ()

    @classmethod
    def from_rings(cls, outer, holes=()) -> Polygon2:
        outer_t = _ring_tuple(outer)
        holes_t = [_ring_tuple(h) for h in holes]
        for ring in [outer_t, *holes_t]:
            if len(ring) < 3:
                raise DegenerateGeometryError(
                    f"Polygon ring needs at least 3 vertices, got {len(ring)}"
                )
            if not LinearRing(ring).is_simple:
                raise DegenerateGeometryError("Polygon ring is self-intersecting")
        shape = ShapelyPolygon(outer_t, holes_t)
        if shape.area <= EPS_LEN * EPS_LEN:
            raise DegenerateGeometryError("Polygon has zero area (collinear vertices)")
        if not shape.is_valid:
            raise DegenerateGeometryError("Polygon holes overlap or leave the outline")
        return cls.from_shapely(shape)

    @classmethod
    def from_shapely(cls, shape) -> Polygon2:
        if shape.geom_type != "Polygon" or shape.is_empty:
            raise DegenerateGeometryError(
                f"Expected a single polygon, got {shape.geom_type}"
            )
        shape = orient(shape, sign=1.0)
        return cls(
            outer=_ring_tuple(shape.exterior.coords),
            holes=tuple(_ring_tuple(r.coords) for r in shape.interiors),
        )

    def to_shapely(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.outer, list(self.holes))

    @property
    def area(self) -> float:
        return float(self.to_shapely().area)

    @property
    def signed_area(self) -> float:
        """Shoelace area of the outer ring (positive when counter-clockwise)."""
        pts = np.asarray(self.outer)
        x, y = pts[:, 0], pts[:, 1]
        return float(0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return tuple(self.to_shapely().bounds)

    def edge(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints of outer-ring edge ``index`` (vertex index to index+1)."""
        n = len(self.outer)
        return np.array(self.outer[index % n]), np.array(self.outer[(index + 1) % n])

    def rings(self) -> list[tuple[Point2, ...]]:
        return [self.outer, *self.holes]


@dataclass(frozen=True)
class Plane3:
    """Plane n . x = offset with unit normal n."""

    normal: tuple[float, float, float]
    offset: float

    def __post_init__(self) -> None:
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > EPS_ANGLE:
            raise DegenerateGeometryError("Plane normal must be a unit vector")

    def canonical(self) -> Plane3:
        """Same plane with the largest-magnitude normal component positive."""
        n = np.asarray(self.normal, dtype=float)
        if n[int(np.argmax(np.abs(n)))] < 0:
            return Plane3(tuple(-n), -self.offset)
        return self

    def distance(self, point) -> float:
        return float(np.dot(self.normal, point) - self.offset)


@dataclass(frozen=True)
class Line3:
    """Infinite line through ``point`` along unit ``direction``."""

    point: tuple[float, float, float]
    direction: tuple[float, float, float]

    def at(self, t: float) -> np.ndarray:
        return np.asarray(self.point) + t * np.asarray(self.direction)


@dataclass(frozen=True)
class Line2:
    """Infinite 2D line through ``point`` along unit ``direction``."""

    point: Point2
    direction: Point2

    def at(self, t: float) -> np.ndarray:
        return np.asarray(self.point) + t * np.asarray(self.direction)

    def parameter(self, p) -> float:
        return float(np.dot(np.asarray(p) - np.asarray(self.point), self.direction))


@dataclass(frozen=True)
class Segment2:
    a: Point2
    b: Point2

    def __post_init__(self) -> None:
        if self.length <= EPS_LEN:
            raise DegenerateGeometryError(f"Degenerate segment {self.a} -> {self.b}")

    @property
    def length(self) -> float:
        return float(np.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1]))

    @property
    def direction(self) -> np.ndarray:
        return (np.asarray(self.b) - np.asarray(self.a)) / self.length

    @property
    def midpoint(self) -> np.ndarray:
        return (np.asarray(self.a) + np.asarray(self.b)) / 2.0


@dataclass(frozen=True)
class Segment3:
    a: tuple[float, float, float]
    b: tuple[float, float, float]

    def __post_init__(self) -> None:
        if self.length <= EPS_LEN:
            raise DegenerateGeometryError(f"Degenerate segment {self.a} -> {self.b}")

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.asarray(self.b) - np.asarray(self.a)))
