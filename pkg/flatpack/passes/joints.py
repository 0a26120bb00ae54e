"""Joint synthesis: press-fit cut geometry for classified intersections.

Widths follow the kerf/interference compensation rules

    c   = 4 kerf + interference
    w_f = pitch + c/2          finger
    w_d = pitch - c/2          dent between two fingers
    w_h = w_f - c              hole receiving a finger
    w_s = w_m + 2 kerf + interference   slot
    l_f = l_h = w_m,  l_s = segment / 2

Each pattern is a set of boundary edits (material added or cut away at the
outline) and interior cuts per part. Edge features follow the mating slab:
a part keeps material inside the mate's thickness on its own finger
sections and gives it up on the others, so the assembled corner is filled
exactly once. apply_patterns realizes the edits with shapely booleans after
checking that no joint adds material where another one removes it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

import numpy as np
from shapely.geometry import Point
from shapely.ops import unary_union

from flatpack.core.fabrication import FabricationSpec
from flatpack.design.component import ComponentInstance
from flatpack.exceptions import (
    JointConflictError,
    JointPlacementError,
    JointTooSmallError,
    JointUnsupportedAngleError,
)
from flatpack.geometry import (
    EPS_ANGLE,
    EPS_PLANE,
    Polygon2,
    Segment2,
    Segment3,
    dihedral_angle,
    plane_of,
)
from flatpack.geometry.polygons import on_boundary
from flatpack.passes.intersect import IntersectionClass, IntersectionRecord

logger = logging.getLogger(__name__)

# Overlap area above which an addition and a removal on one part conflict, mm^2
CONFLICT_AREA = 1e-9

# Dents reach this far past the outline so no sliver survives the difference, mm
CUT_OVERSHOOT = 1e-3


class JointKind(str, Enum):
    FINGER_FINGER = "finger-finger"
    FINGER_HOLE = "finger-hole"
    SLOT_SLOT = "slot-slot"
    SLOT_SINGLE = "slot-single"
    FLEX_HINGE = "flex-hinge"


class EditOp(str, Enum):
    ADD = "add"
    CUT = "cut"


@dataclass(frozen=True)
class BoundaryEdit:
    op: EditOp
    region: Polygon2


@dataclass(frozen=True)
class JointParameters:
    """Compensated joint dimensions in mm (NaN where a kind has no such feature)."""

    w_f: float = math.nan
    w_d: float = math.nan
    w_h: float = math.nan
    w_s: float = math.nan
    l_f: float = math.nan
    l_h: float = math.nan
    l_s: float = math.nan
    pitch: float = math.nan
    sections: int = 0


@dataclass(frozen=True)
class JointPattern:
    kind: JointKind
    label: str
    part_i: str
    part_j: str | None = None
    boundary_edits_i: tuple[BoundaryEdit, ...] = ()
    boundary_edits_j: tuple[BoundaryEdit, ...] = ()
    interior_cuts_i: tuple[Polygon2, ...] = ()
    interior_cuts_j: tuple[Polygon2, ...] = ()
    parameters: JointParameters = field(default_factory=JointParameters)
    segment: Segment3 | None = None

    @property
    def key(self) -> tuple[str, Segment3 | None]:
        """Identity of the joint; one part pair may meet along several segments."""
        return self.label, self.segment

    def edits_for(self, part_id: str) -> tuple[tuple[BoundaryEdit, ...], tuple[Polygon2, ...]]:
        if part_id == self.part_i:
            return self.boundary_edits_i, self.interior_cuts_i
        if part_id == self.part_j:
            return self.boundary_edits_j, self.interior_cuts_j
        return (), ()


# ---------------------------------------------------------------------------
# Dimensions
# ---------------------------------------------------------------------------


def finger_layout(length: float, spec: FabricationSpec, nominal_pitch: float | None = None) -> JointParameters:
    """Odd section count n >= 3 at pitch length/n, with compensated widths.

    Raises:
        JointTooSmallError: If the segment is shorter than the minimum joint length.
    """
    if length < spec.min_joint_length - EPS_PLANE:
        raise JointTooSmallError(
            f"Segment of {length:.3f} mm is shorter than {spec.min_joint_length:g} mm"
        )
    nominal = nominal_pitch or max(2.0 * spec.thickness, length / 9.0)
    n = max(3, int(math.floor(length / nominal + 1e-9)))
    if n % 2 == 0:
        n -= 1
    n = max(3, n)
    pitch = length / n
    c = spec.finger_compensation
    w_d = pitch - c / 2.0
    if w_d <= 0:
        raise JointTooSmallError(f"Pitch {pitch:.3f} mm leaves no dent for compensation {c:g} mm")
    return JointParameters(
        w_f=pitch + c / 2.0,
        w_d=w_d,
        w_h=pitch + c / 2.0 - c,
        w_s=spec.slot_width,
        l_f=spec.thickness,
        l_h=spec.thickness,
        l_s=length / 2.0,
        pitch=pitch,
        sections=n,
    )


def slot_parameters(length: float, spec: FabricationSpec) -> JointParameters:
    return JointParameters(w_s=spec.slot_width, l_s=length / 2.0, l_f=spec.thickness)


# ---------------------------------------------------------------------------
# Local geometry helpers
# ---------------------------------------------------------------------------


def _strip(segment: Segment2, t0: float, t1: float, d0: float, d1: float, normal: np.ndarray) -> Polygon2:
    """Rectangle spanning [t0, t1] along the segment and [d0, d1] along ``normal``."""
    a = np.asarray(segment.a)
    u = segment.direction
    corners = [a + u * t + normal * d for t, d in ((t0, d0), (t1, d0), (t1, d1), (t0, d1))]
    return Polygon2.from_rings([tuple(p) for p in corners])


def _left_normal(segment: Segment2) -> np.ndarray:
    u = segment.direction
    return np.array([-u[1], u[0]])


def outward_normal(polygon: Polygon2, segment: Segment2) -> np.ndarray:
    """Unit normal of a boundary segment pointing out of the polygon."""
    n = _left_normal(segment)
    sample = segment.midpoint + n * 1e-4
    if polygon.to_shapely().contains(Point(sample)):
        n = -n
    return n


def _finger_intervals(params: JointParameters, length: float, sections: Iterable[int]) -> list[tuple[float, float]]:
    out = []
    for k in sections:
        center = (k + 0.5) * params.pitch
        lo = max(0.0, center - params.w_f / 2.0)
        hi = min(length, center + params.w_f / 2.0)
        out.append((lo, hi))
    return out


def _gaps(intervals: list[tuple[float, float]], length: float) -> list[tuple[float, float]]:
    """Complement of sorted intervals within [0, length]."""
    out = []
    cursor = 0.0
    for lo, hi in sorted(intervals):
        if lo - cursor > EPS_PLANE:
            out.append((cursor, lo))
        cursor = max(cursor, hi)
    if length - cursor > EPS_PLANE:
        out.append((cursor, length))
    return out


def mate_band(
    part: ComponentInstance,
    mate: ComponentInstance,
    segment: Segment2,
    normal: np.ndarray,
    thickness: float,
    label: str = "",
) -> tuple[float, float]:
    """Depths [d0, d1] along ``normal`` from ``segment`` where ``mate``'s slab crosses ``part``.

    Both parts occupy local z in [0, thickness]. Negative depths lie on the
    far side of the segment from ``normal``.
    """
    assert part.placement is not None and mate.placement is not None
    rel = mate.placement.inverse() @ part.placement
    start = np.array([*segment.midpoint, thickness / 2.0])
    step = start + np.array([normal[0], normal[1], 0.0])
    z0, z1 = rel.apply(np.array([start, step]))[:, 2]
    slope = float(z1 - z0)
    if abs(slope) < EPS_ANGLE:
        raise JointUnsupportedAngleError(label, 0.0)
    d0, d1 = sorted((-z0 / slope, (thickness - z0) / slope))
    return float(d0), float(d1)


def _edge_features(
    part: ComponentInstance,
    mate: ComponentInstance,
    segment: Segment2,
    intervals: list[tuple[float, float]],
    thickness: float,
    label: str,
) -> tuple[BoundaryEdit, ...]:
    """Fingers where the mate lies past the outline, dents where it overlaps the part.

    Fingers fill the mate's band on ``intervals``; dents clear it on the
    remaining sections of the segment.
    """
    normal = outward_normal(part.polygon, segment)
    d0, d1 = mate_band(part, mate, segment, normal, thickness, label)
    edits = []
    if d1 > EPS_PLANE:
        edits.extend(
            BoundaryEdit(EditOp.ADD, _strip(segment, lo, hi, max(d0, 0.0), d1, normal))
            for lo, hi in intervals
        )
    if d0 < -EPS_PLANE:
        edits.extend(
            BoundaryEdit(EditOp.CUT, _strip(segment, lo, hi, d0, CUT_OVERSHOOT, normal))
            for lo, hi in _gaps(intervals, segment.length)
        )
    return tuple(edits)


def _check_right_angle(record: IntersectionRecord, parts: Mapping[str, ComponentInstance], spec: FabricationSpec) -> None:
    a, b = parts[record.i], parts[record.j]
    angle = dihedral_angle(plane_of(a.polygon, a.placement), plane_of(b.polygon, b.placement))
    if abs(angle - 90.0) > spec.right_angle_tolerance_deg:
        raise JointUnsupportedAngleError(record.label, angle)


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------


def finger_finger_pattern(
    record: IntersectionRecord,
    parts: Mapping[str, ComponentInstance],
    spec: FabricationSpec,
    nominal_pitch: float | None = None,
) -> JointPattern:
    """Complementary fingers on both edges: part i on the even sections, j on the odd ones.

    Each part keeps the corner volume on its own sections, protruding into
    the mate when the mate lies past its outline and dented on the other
    sections when the mate overlaps it.
    """
    _check_right_angle(record, parts, spec)
    length = record.segment_local_i.length
    params = finger_layout(length, spec, nominal_pitch)
    edits = []
    for part_id, mate_id, seg, first in (
        (record.i, record.j, record.segment_local_i, 0),
        (record.j, record.i, record.segment_local_j, 1),
    ):
        intervals = _finger_intervals(params, length, range(first, params.sections, 2))
        edits.append(
            _edge_features(parts[part_id], parts[mate_id], seg, intervals, spec.thickness, record.label)
        )
    return JointPattern(
        kind=JointKind.FINGER_FINGER,
        label=record.label,
        part_i=record.i,
        part_j=record.j,
        boundary_edits_i=edits[0],
        boundary_edits_j=edits[1],
        parameters=params,
        segment=record.segment_3d,
    )


def finger_hole_pattern(
    record: IntersectionRecord,
    parts: Mapping[str, ComponentInstance],
    spec: FabricationSpec,
    nominal_pitch: float | None = None,
) -> JointPattern:
    """Fingers on the edge part, matching through-holes in the face part.

    Fingers sit on the even sections, both segment ends included. Each hole
    spans the edge part's thickness across the face and its finger's
    interval narrowed by c/2 at both ends.

    Raises:
        JointPlacementError: If a hole comes closer than w_m/2 to the face part's outline.
    """
    _check_right_angle(record, parts, spec)
    if record.classification is IntersectionClass.EDGE_FACE:
        edge_id, edge_seg, face_id, face_seg = record.i, record.segment_local_i, record.j, record.segment_local_j
    else:
        edge_id, edge_seg, face_id, face_seg = record.j, record.segment_local_j, record.i, record.segment_local_i
    length = edge_seg.length
    params = finger_layout(length, spec, nominal_pitch)
    intervals = _finger_intervals(params, length, range(0, params.sections, 2))
    edge_part, face_part = parts[edge_id], parts[face_id]
    fingers = _edge_features(edge_part, face_part, edge_seg, intervals, spec.thickness, record.label)

    face = face_part.polygon.to_shapely()
    across = _left_normal(face_seg)
    d0, d1 = mate_band(face_part, edge_part, face_seg, across, spec.thickness, record.label)
    shrink = spec.finger_compensation / 2.0
    holes = []
    for lo, hi in intervals:
        hole = _strip(face_seg, lo + shrink, hi - shrink, d0, d1, across)
        shape = hole.to_shapely()
        if not face.contains(shape) or face.exterior.distance(shape) < spec.thickness / 2.0 - EPS_PLANE or any(
            ring.distance(shape) < spec.thickness / 2.0 - EPS_PLANE for ring in face.interiors
        ):
            raise JointPlacementError(
                f"Hole for joint {record.label} breaches the outline of '{face_id}'"
            )
        holes.append(hole)

    kwargs = (
        {"boundary_edits_i": fingers, "interior_cuts_j": tuple(holes)}
        if edge_id == record.i
        else {"boundary_edits_j": fingers, "interior_cuts_i": tuple(holes)}
    )
    return JointPattern(
        kind=JointKind.FINGER_HOLE,
        label=record.label,
        part_i=record.i,
        part_j=record.j,
        parameters=params,
        segment=record.segment_3d,
        **kwargs,
    )


def _slot_cut(
    polygon: Polygon2,
    segment: Segment2,
    t0: float,
    t1: float,
    outer_t: float,
    width: float,
    overshoot: float,
) -> tuple[str, Polygon2]:
    """Slot over [t0, t1]; carried ``overshoot`` past the outline when the outer end touches it."""
    across = _left_normal(segment)
    outer_point = np.asarray(segment.a) + segment.direction * outer_t
    if on_boundary(polygon, outer_point):
        if outer_t <= t0:
            t0 -= overshoot
        else:
            t1 += overshoot
        return "edit", _strip(segment, t0, t1, -width / 2.0, width / 2.0, across)
    return "cut", _strip(segment, t0, t1, -width / 2.0, width / 2.0, across)


def slot_slot_pattern(
    record: IntersectionRecord,
    parts: Mapping[str, ComponentInstance],
    spec: FabricationSpec,
) -> JointPattern:
    """Cross-lap halves for face-face records, one pass-through slot when contained.

    Part i (the first by part_sort_key) is slotted from the segment's
    parameter-0 end and part j from the other end. A slot opens through the
    outline when its outer end lies on it.
    """
    length = record.segment_local_i.length
    if record.classification is IntersectionClass.FACE_FACE_CONTAINED:
        params = JointParameters(w_s=spec.slot_width, l_s=length, l_f=spec.thickness)
        in_i = record.container == record.i
        seg = record.segment_local_i if in_i else record.segment_local_j
        across = _left_normal(seg)
        slot = _strip(seg, 0.0, length, -params.w_s / 2.0, params.w_s / 2.0, across)
        key = "interior_cuts_i" if in_i else "interior_cuts_j"
        return JointPattern(
            kind=JointKind.SLOT_SINGLE,
            label=record.label,
            part_i=record.i,
            part_j=record.j,
            parameters=params,
            segment=record.segment_3d,
            **{key: (slot,)},
        )

    params = slot_parameters(length, spec)
    half = length / 2.0
    poly_i, poly_j = parts[record.i].polygon, parts[record.j].polygon
    seg_i, seg_j = record.segment_local_i, record.segment_local_j
    halves_i, halves_j = (0.0, half, 0.0), (half, length, length)

    cuts: dict[str, tuple] = {
        "boundary_edits_i": (),
        "boundary_edits_j": (),
        "interior_cuts_i": (),
        "interior_cuts_j": (),
    }
    for suffix, polygon, seg, (t0, t1, outer_t) in (("i", poly_i, seg_i, halves_i), ("j", poly_j, seg_j, halves_j)):
        kind, region = _slot_cut(polygon, seg, t0, t1, outer_t, params.w_s, spec.thickness)
        if kind == "edit":
            cuts[f"boundary_edits_{suffix}"] = (BoundaryEdit(EditOp.CUT, region),)
        else:
            cuts[f"interior_cuts_{suffix}"] = (region,)
    return JointPattern(
        kind=JointKind.SLOT_SLOT,
        label=record.label,
        part_i=record.i,
        part_j=record.j,
        parameters=params,
        segment=record.segment_3d,
        **cuts,
    )


def flex_hinge_pattern(
    part_id: str,
    region: tuple[float, float, float, float],
    spec: FabricationSpec,
    module_rows: int = 1,
    module_cols: int = 1,
) -> JointPattern:
    """Lattice hinge: a grid of modules, each a row of alternating spring slits.

    Within a module of width mw and height mh, slits of width ``hinge_gap``
    sit at a pitch of beam + gap. Even slits leave a junction of two beams at
    the top, odd slits at the bottom, so neighbouring slits overlap into a
    serpentine spring. Extra columns replicate the module transversely.

    Raises:
        JointTooSmallError: If the region cannot hold one module.
    """
    x0, y0, x1, y1 = region
    if module_rows < 1 or module_cols < 1:
        raise JointTooSmallError(f"Hinge on '{part_id}' needs at least one module")
    beam, gap = spec.hinge_beam_width, spec.hinge_gap
    mw = (x1 - x0) / module_cols
    mh = (y1 - y0) / module_rows
    slits = int(math.floor((mw - 2.0 * beam) / (beam + gap) + 1e-9))
    if slits < 1 or mh <= 3.0 * beam:
        raise JointTooSmallError(
            f"Hinge region {mw:g} x {mh:g} mm on '{part_id}' is too small for one module"
        )
    cuts = []
    for row in range(module_rows):
        for col in range(module_cols):
            ox, oy = x0 + col * mw, y0 + row * mh
            for k in range(slits):
                sx = ox + beam + k * (beam + gap)
                lo, hi = (beam, mh - 2.0 * beam) if k % 2 == 0 else (2.0 * beam, mh - beam)
                cuts.append(
                    Polygon2.from_rings(
                        [(sx, oy + lo), (sx + gap, oy + lo), (sx + gap, oy + hi), (sx, oy + hi)]
                    )
                )
    return JointPattern(
        kind=JointKind.FLEX_HINGE,
        label=f"hinge {part_id}",
        part_i=part_id,
        interior_cuts_i=tuple(cuts),
        parameters=JointParameters(pitch=beam + gap, sections=slits),
    )


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------


def pattern_for_record(
    record: IntersectionRecord,
    parts: Mapping[str, ComponentInstance],
    spec: FabricationSpec,
) -> JointPattern:
    kind = record.classification.joint_kind
    if kind == JointKind.FINGER_FINGER.value:
        return finger_finger_pattern(record, parts, spec)
    if kind == JointKind.FINGER_HOLE.value:
        return finger_hole_pattern(record, parts, spec)
    return slot_slot_pattern(record, parts, spec)


JointKey = tuple[str, Segment3 | None]


def _describe(key: JointKey, located: bool) -> str:
    label, segment = key
    if not located or segment is None:
        return label
    mid = (np.asarray(segment.a) + np.asarray(segment.b)) / 2.0
    return f"{label} at ({mid[0]:.3f}, {mid[1]:.3f}, {mid[2]:.3f})"


def _check_conflicts(
    part_id: str,
    adds: list[tuple[JointKey, Polygon2]],
    cuts: list[tuple[JointKey, Polygon2]],
) -> None:
    """Material added by one joint must not overlap material removed by another.

    Overlapping removals (or additions) of different joints agree with each
    other and are merged.
    """
    removed = [(key, region.to_shapely()) for key, region in cuts]
    for first, region in adds:
        a = region.to_shapely()
        for second, b in removed:
            if first == second:
                continue
            if a.intersects(b) and a.intersection(b).area > CONFLICT_AREA:
                located = first[0] == second[0]
                raise JointConflictError(part_id, _describe(first, located), _describe(second, located))


def apply_patterns(
    parts: Mapping[str, ComponentInstance], patterns: Iterable[JointPattern]
) -> dict[str, ComponentInstance]:
    """Realize every pattern on its parts.

    Material is added first (fingers), then boundary cuts and interior cuts
    are subtracted. The result of each part must stay one simple polygon.

    Raises:
        JointConflictError: If one joint adds material where another removes it.
        JointPlacementError: If the cuts split a part or leave it invalid.
    """
    patterns = list(patterns)
    out = dict(parts)
    for part_id, part in parts.items():
        adds: list[tuple[JointKey, Polygon2]] = []
        cuts: list[tuple[JointKey, Polygon2]] = []
        for pattern in patterns:
            edits, interior = pattern.edits_for(part_id)
            adds.extend((pattern.key, e.region) for e in edits if e.op is EditOp.ADD)
            cuts.extend((pattern.key, e.region) for e in edits if e.op is EditOp.CUT)
            cuts.extend((pattern.key, c) for c in interior)
        if not adds and not cuts:
            continue
        _check_conflicts(part_id, adds, cuts)
        shape = part.polygon.to_shapely()
        if adds:
            shape = unary_union([shape, *(r.to_shapely() for _, r in adds)])
        if cuts:
            shape = shape.difference(unary_union([r.to_shapely() for _, r in cuts]))
        shape = shape.simplify(0.0) if shape.geom_type == "Polygon" else shape
        if shape.geom_type != "Polygon" or not shape.is_valid or shape.is_empty:
            raise JointPlacementError(f"Joint cuts split or invalidate part '{part_id}'")
        out[part_id] = replace(part, polygon=Polygon2.from_shapely(shape))
        logger.debug("Applied %d additions and %d cuts to %s", len(adds), len(cuts), part_id)
    return out
