"""Computational-geometry kernel shared by every compiler pass."""

from __future__ import annotations

from flatpack.geometry.base import (
    EPS_ANGLE,
    EPS_LEN,
    EPS_PLANE,
    Line2,
    Line3,
    Plane3,
    Polygon2,
    Segment2,
    Segment3,
)
from flatpack.geometry.mesh import extrude_polygon
from flatpack.geometry.planes import (
    PlaneRelation,
    coplanar,
    dihedral_angle,
    parallel,
    plane_intersection,
    plane_of,
)
from flatpack.geometry.polygons import (
    can_merge,
    clip_intervals,
    clip_line_to_polygon,
    interval_intersection,
    polygon_union,
    segment_on_boundary,
    segment_set_intersection,
)
from flatpack.geometry.transforms import (
    Transform,
    transform_compose,
    transform_invert,
)

__all__ = [
    "EPS_ANGLE",
    "EPS_LEN",
    "EPS_PLANE",
    "Line2",
    "Line3",
    "Plane3",
    "PlaneRelation",
    "Polygon2",
    "Segment2",
    "Segment3",
    "Transform",
    "can_merge",
    "clip_intervals",
    "clip_line_to_polygon",
    "coplanar",
    "dihedral_angle",
    "extrude_polygon",
    "interval_intersection",
    "parallel",
    "plane_intersection",
    "plane_of",
    "polygon_union",
    "segment_on_boundary",
    "segment_set_intersection",
    "transform_compose",
    "transform_invert",
]
