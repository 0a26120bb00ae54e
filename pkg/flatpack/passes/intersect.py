"""Intersection pass: coplanar merge, segment detection and classification.

Every unordered pair of placed parts whose planes meet in a line is clipped
against both outlines; the common 1D pieces become IntersectionRecords whose
class (edge-edge, edge-face, face-edge, face-face) selects the joint type.
Carrier lines are parameterized in the local frame of the pair's first part
(by part_sort_key) so the records do not depend on where the model sits in
the world.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from shapely.geometry import MultiPoint, Point

from flatpack.design.component import ComponentInstance
from flatpack.design.model import part_sort_key
from flatpack.geometry import (
    EPS_PLANE,
    Line2,
    PlaneRelation,
    Polygon2,
    Segment2,
    Segment3,
    can_merge,
    clip_intervals,
    coplanar,
    interval_intersection,
    plane_intersection,
    plane_of,
    polygon_union,
    segment_on_boundary,
)
from flatpack.geometry.polygons import on_boundary
from flatpack.passes.placement import PlacedModel

logger = logging.getLogger(__name__)

# Decimal places kept for carrier-line coordinates and interval ends
_SNAP_DIGITS = 9


class IntersectionClass(str, Enum):
    EDGE_EDGE = "edge-edge"
    EDGE_FACE = "edge-face"
    FACE_EDGE = "face-edge"
    FACE_FACE = "face-face"
    FACE_FACE_CONTAINED = "face-face-contained"

    @property
    def joint_kind(self) -> str:
        if self is IntersectionClass.EDGE_EDGE:
            return "finger-finger"
        if self in (IntersectionClass.EDGE_FACE, IntersectionClass.FACE_EDGE):
            return "finger-hole"
        return "slot-slot"


@dataclass(frozen=True)
class IntersectionRecord:
    """One straight segment where parts i < j meet."""

    i: str
    j: str
    segment_3d: Segment3
    segment_local_i: Segment2
    segment_local_j: Segment2
    classification: IntersectionClass
    source: str = "auto"  # "user" when a user connection joins the pair
    connection: str | None = None
    # For face-face-contained: the part that receives the single slot
    container: str | None = None

    @property
    def length(self) -> float:
        return self.segment_3d.length

    @property
    def label(self) -> str:
        return f"{self.i} × {self.j}"

    def report_line(self) -> str:
        return (
            f"{self.label}: {self.classification.value} "
            f"len={self.length:.3f} source={self.source}"
        )


def on_edge(part: ComponentInstance | Polygon2, segment: Segment2, eps: float = EPS_PLANE) -> bool:
    """True when both endpoints and the midpoint lie on the part's boundary."""
    polygon = part.polygon if isinstance(part, ComponentInstance) else part
    return segment_on_boundary(polygon, segment, eps)


# ---------------------------------------------------------------------------
# Coplanar merge
# ---------------------------------------------------------------------------


def _polygon_in_frame(part: ComponentInstance, frame_of: ComponentInstance) -> Polygon2:
    """``part``'s outline expressed in ``frame_of``'s local xy-plane."""
    assert part.placement is not None and frame_of.placement is not None
    rel = frame_of.placement.inverse() @ part.placement
    rings = [rel.apply(np.asarray(ring))[:, :2] for ring in part.polygon.rings()]
    return Polygon2.from_rings(rings[0], rings[1:])


def _find_merge(parts: dict[str, ComponentInstance]) -> tuple[str, str] | None:
    ids = sorted(parts, key=part_sort_key)
    planes = {cid: plane_of(parts[cid].polygon, parts[cid].placement) for cid in ids}
    for n, first in enumerate(ids):
        for second in ids[n + 1 :]:
            if not coplanar(planes[first], planes[second]):
                continue
            mapped = _polygon_in_frame(parts[second], parts[first])
            if can_merge(parts[first].polygon, mapped):
                return first, second
    return None


def merge_coplanar(pm: PlacedModel) -> PlacedModel:
    """Union coplanar parts whose regions overlap or touch.

    The first part by part_sort_key survives and carries the union in its own
    local frame; chains merge transitively until no pair qualifies.
    """
    parts = dict(pm.parts)
    merged = dict(pm.merged)
    while (pair := _find_merge(parts)) is not None:
        keep, drop = pair
        survivor, absorbed = parts[keep], parts.pop(drop)
        union = polygon_union(survivor.polygon, _polygon_in_frame(absorbed, survivor))
        parts[keep] = replace(
            survivor,
            polygon=union,
            absorbed=(*survivor.absorbed, drop, *absorbed.absorbed),
        )
        merged[drop] = keep
        logger.info("Merged coplanar part %s into %s", drop, keep)
    ordered = {cid: parts[cid] for cid in sorted(parts, key=part_sort_key)}
    return replace(pm, parts=ordered, merged=merged)


# ---------------------------------------------------------------------------
# Segment detection
# ---------------------------------------------------------------------------


def _snap(values) -> tuple[float, ...]:
    return tuple(float(v) + 0.0 for v in np.round(np.asarray(values, dtype=float), _SNAP_DIGITS))


def _carrier_lines(a: ComponentInstance, b: ComponentInstance, line3) -> tuple[Line2, Line2]:
    """The shared line in both local frames, with one common parameterization."""
    assert a.placement is not None and b.placement is not None
    inv_a = a.placement.inverse()
    direction = inv_a.apply_vector(line3.direction)[0][:2]
    direction = direction / np.linalg.norm(direction)
    if direction[int(np.argmax(np.abs(direction)))] < 0:
        direction = -direction
    point = inv_a.apply(np.asarray(line3.point))[0][:2]
    # Foot of the perpendicular from the local origin
    point = point - np.dot(point, direction) * direction
    point, direction = np.array(_snap(point)), np.array(_snap(direction))
    line_a = Line2(tuple(point), tuple(direction))

    inv_b = b.placement.inverse()
    world_point = a.placement.apply(point)[0]
    world_dir = a.placement.apply_vector(np.append(direction, 0.0))[0]
    point_b = inv_b.apply(world_point)[0][:2]
    dir_b = inv_b.apply_vector(world_dir)[0][:2]
    line_b = Line2(tuple(point_b), tuple(dir_b / np.linalg.norm(dir_b)))
    return line_a, line_b


def _strictly_inside(polygon: Polygon2, point) -> bool:
    return polygon.to_shapely().contains(Point(point)) and not on_boundary(polygon, point)


def _container(a: ComponentInstance, b: ComponentInstance, seg_a: Segment2, seg_b: Segment2) -> str | None:
    """Id of the part that wholly contains the other's crossing, if any."""
    for inner, outer, seg_in, seg_out in ((a, b, seg_a, seg_b), (b, a, seg_b, seg_a)):
        spans_inner = on_boundary(inner.polygon, seg_in.a) and on_boundary(inner.polygon, seg_in.b)
        inside_outer = _strictly_inside(outer.polygon, seg_out.a) and _strictly_inside(
            outer.polygon, seg_out.b
        )
        if not (spans_inner and inside_outer):
            continue
        rel = outer.placement.inverse() @ inner.placement
        hull = MultiPoint([tuple(p) for p in rel.apply(np.asarray(inner.polygon.outer))[:, :2]]).convex_hull
        if outer.polygon.to_shapely().buffer(EPS_PLANE).covers(hull):
            return outer.id
    return None


def classify(
    a: ComponentInstance, b: ComponentInstance, seg_a: Segment2, seg_b: Segment2
) -> tuple[IntersectionClass, str | None]:
    edge_a = on_edge(a, seg_a)
    edge_b = on_edge(b, seg_b)
    if edge_a and edge_b:
        return IntersectionClass.EDGE_EDGE, None
    if edge_a:
        return IntersectionClass.EDGE_FACE, None
    if edge_b:
        return IntersectionClass.FACE_EDGE, None
    container = _container(a, b, seg_a, seg_b)
    if container is not None:
        return IntersectionClass.FACE_FACE_CONTAINED, container
    return IntersectionClass.FACE_FACE, None


def _user_pairs(pm: PlacedModel) -> dict[frozenset[str], str]:
    pairs: dict[frozenset[str], str] = {}
    for conn in pm.connections:
        key = frozenset(pm.resolve(cid) for cid in conn.parts)
        if len(key) == 2:
            pairs.setdefault(key, conn.label)
    return pairs


def find_intersection_segments(
    pm: PlacedModel,
    min_joint_length: float = 0.0,
    warnings: list[str] | None = None,
) -> list[IntersectionRecord]:
    """Records for every pair of non-parallel parts that meet along a segment.

    Segments shorter than ``min_joint_length`` and pairs marked no_joint are
    dropped; each drop is logged and appended to ``warnings``.
    """
    warnings = warnings if warnings is not None else []
    user_pairs = _user_pairs(pm)
    suppressed = {frozenset(pm.resolve(cid) for cid in pair) for pair in pm.design.no_joint}
    ids = sorted(pm.parts, key=part_sort_key)
    planes = {cid: plane_of(pm.parts[cid].polygon, pm.parts[cid].placement) for cid in ids}
    records: list[IntersectionRecord] = []
    for n, i in enumerate(ids):
        for j in ids[n + 1 :]:
            line3 = plane_intersection(planes[i], planes[j])
            if isinstance(line3, PlaneRelation):
                continue
            a, b = pm.parts[i], pm.parts[j]
            line_a, line_b = _carrier_lines(a, b, line3)
            common = interval_intersection(
                clip_intervals(line_a, a.polygon), clip_intervals(line_b, b.polygon)
            )
            for t0, t1 in common:
                t0, t1 = _snap((t0, t1))
                if t1 - t0 < min_joint_length:
                    message = f"{i} × {j}: dropped segment of {t1 - t0:.3f} mm (< {min_joint_length:g} mm)"
                    logger.warning(message)
                    warnings.append(message)
                    continue
                key = frozenset((i, j))
                if key in suppressed and key not in user_pairs:
                    message = f"{i} × {j}: intersection suppressed by no_joint"
                    logger.warning(message)
                    warnings.append(message)
                    continue
                seg_a = Segment2(tuple(line_a.at(t0)), tuple(line_a.at(t1)))
                seg_b = Segment2(tuple(line_b.at(t0)), tuple(line_b.at(t1)))
                p0, p1 = a.placement.apply([seg_a.a, seg_a.b])
                cls, container = classify(a, b, seg_a, seg_b)
                records.append(
                    IntersectionRecord(
                        i=i,
                        j=j,
                        segment_3d=Segment3(tuple(p0), tuple(p1)),
                        segment_local_i=seg_a,
                        segment_local_j=seg_b,
                        classification=cls,
                        source="user" if key in user_pairs else "auto",
                        connection=user_pairs.get(key),
                        container=container,
                    )
                )
    logger.info(
        "Found %d intersection records (%d user, %d auto)",
        len(records),
        sum(r.source == "user" for r in records),
        sum(r.source == "auto" for r in records),
    )
    return records


# ---------------------------------------------------------------------------
# Feature assignment
# ---------------------------------------------------------------------------


def classify_and_assign(pm: PlacedModel, records: list[IntersectionRecord]) -> PlacedModel:
    """Append each record's segments to the finger, hole and slot lists of its parts."""
    features: dict[str, dict[str, list[Segment2]]] = {
        cid: {"fingers": list(p.fingers), "holes": list(p.holes), "slots": list(p.slots)}
        for cid, p in pm.parts.items()
    }
    for r in records:
        fi, fj = features[r.i], features[r.j]
        cls = r.classification
        if cls is IntersectionClass.EDGE_EDGE:
            fi["fingers"].append(r.segment_local_i)
            fj["fingers"].append(r.segment_local_j)
        elif cls is IntersectionClass.EDGE_FACE:
            fi["fingers"].append(r.segment_local_i)
            fj["holes"].append(r.segment_local_j)
        elif cls is IntersectionClass.FACE_EDGE:
            fi["holes"].append(r.segment_local_i)
            fj["fingers"].append(r.segment_local_j)
        elif cls is IntersectionClass.FACE_FACE_CONTAINED:
            if r.container == r.i:
                fi["slots"].append(r.segment_local_i)
            else:
                fj["slots"].append(r.segment_local_j)
        else:
            fi["slots"].append(r.segment_local_i)
            fj["slots"].append(r.segment_local_j)
    parts = {
        cid: replace(
            part,
            fingers=tuple(features[cid]["fingers"]),
            holes=tuple(features[cid]["holes"]),
            slots=tuple(features[cid]["slots"]),
        )
        for cid, part in pm.parts.items()
    }
    return replace(pm, parts=parts)
