"""Plane construction, plane-plane intersection and coplanarity tests."""

from __future__ import annotations

from enum import Enum

import numpy as np

from flatpack.exceptions import DegenerateGeometryError
from flatpack.geometry.base import EPS_ANGLE, EPS_PLANE, Line3, Plane3, Polygon2
from flatpack.geometry.transforms import Transform


class PlaneRelation(str, Enum):
    """Outcome of plane_intersection when the planes do not meet in a line."""

    PARALLEL = "parallel"
    COPLANAR = "coplanar"


def plane_of(polygon: Polygon2, placement: Transform) -> Plane3:
    """Plane containing the placed polygon, normal along its front face.

    The outer ring is counter-clockwise, so the right-hand normal of the
    placed ring equals the placement's local +z axis.

    Raises:
        DegenerateGeometryError: If the polygon has no three non-collinear vertices.
    """
    pts = placement.apply(np.asarray(polygon.outer, dtype=float))
    best = None
    best_norm = 0.0
    origin = pts[0]
    for i in range(1, len(pts) - 1):
        n = np.cross(pts[i] - origin, pts[i + 1] - origin)
        norm = float(np.linalg.norm(n))
        if norm > best_norm:
            best, best_norm = n, norm
    if best is None or best_norm <= EPS_PLANE:
        raise DegenerateGeometryError("Cannot derive a plane from collinear vertices")
    normal = best / best_norm
    # Align with the front normal regardless of which vertex triple was used
    if np.dot(normal, placement.rotation[:, 2]) < 0:
        normal = -normal
    return Plane3(tuple(float(v) for v in normal), float(np.dot(normal, origin)))


def parallel(p1: Plane3, p2: Plane3) -> bool:
    return float(np.linalg.norm(np.cross(p1.normal, p2.normal))) <= EPS_ANGLE


def coplanar(p1: Plane3, p2: Plane3) -> bool:
    """Planes equal after sign canonicalization, within the shared tolerances."""
    a, b = p1.canonical(), p2.canonical()
    return (
        abs(float(np.dot(a.normal, b.normal))) > 1.0 - EPS_ANGLE
        and abs(a.offset - b.offset) < EPS_PLANE
    )


def plane_intersection(p1: Plane3, p2: Plane3) -> Line3 | PlaneRelation:
    """Line shared by two planes, or the reason there is none."""
    if parallel(p1, p2):
        return PlaneRelation.COPLANAR if coplanar(p1, p2) else PlaneRelation.PARALLEL
    n1 = np.asarray(p1.normal)
    n2 = np.asarray(p2.normal)
    direction = np.cross(n1, n2)
    direction = direction / np.linalg.norm(direction)
    # Point on both planes closest to the origin
    a = np.vstack([n1, n2, direction])
    b = np.array([p1.offset, p2.offset, 0.0])
    point = np.linalg.solve(a, b)
    return Line3(tuple(float(v) for v in point), tuple(float(v) for v in direction))


def dihedral_angle(p1: Plane3, p2: Plane3) -> float:
    """Angle between the planes in degrees, folded into [0, 90]."""
    c = abs(float(np.dot(p1.normal, p2.normal)))
    return float(np.degrees(np.arccos(min(1.0, c))))
