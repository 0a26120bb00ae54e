"""Tests for joint dimensions, pattern construction and pattern application."""

from __future__ import annotations

import numpy as np
import pytest
from shapely.geometry import Point, box

from flatpack.core.fabrication import FabricationSpec
from flatpack.design import FlatDesign, instantiate_component
from flatpack.exceptions import (
    JointConflictError,
    JointPlacementError,
    JointTooSmallError,
    JointUnsupportedAngleError,
)
from flatpack.geometry import Polygon2, Segment2, Segment3, Transform
from flatpack.passes.intersect import (
    IntersectionClass,
    IntersectionRecord,
    find_intersection_segments,
)
from flatpack.passes.joints import (
    BoundaryEdit,
    EditOp,
    JointKind,
    JointPattern,
    apply_patterns,
    finger_hole_pattern,
    finger_layout,
    flex_hinge_pattern,
    pattern_for_record,
    slot_parameters,
)
from flatpack.passes.pipeline import compile_design
from flatpack.passes.placement import PlacedModel


def placed_pair(rectangle, first: tuple, second: tuple) -> PlacedModel:
    """Parts "a" and "b" given as ((l, w), placement)."""
    parts = {
        cid: instantiate_component(rectangle, {"l": l, "w": w}, id=cid).with_placement(placement)
        for cid, ((l, w), placement) in (("a", first), ("b", second))
    }
    design = FlatDesign(name="test", components=parts, connections=())
    return PlacedModel(design=design, parts=parts, seed="a")


def upright(x: float, y: float, z: float) -> Transform:
    return Transform.translation(x, y, z) @ Transform.rot_x(90.0)


def only_record(pm: PlacedModel):
    (record,) = find_intersection_segments(pm)
    return record


def square(x0: float, y0: float, x1: float, y1: float) -> Polygon2:
    return Polygon2.from_rings([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


# ------------------------------------------------------------------
# Dimensions
# ------------------------------------------------------------------


class TestFingerLayout:
    def test_worked_example(self, spec) -> None:
        params = finger_layout(30.0, spec, nominal_pitch=6.0)
        assert params.sections == 5
        assert params.pitch == pytest.approx(6.0)
        assert params.w_f == pytest.approx(6.225)
        assert params.w_d == pytest.approx(5.775)
        assert params.w_h == pytest.approx(5.775)
        assert params.l_f == params.l_h == 3.0

    def test_even_count_drops_to_odd(self, spec) -> None:
        params = finger_layout(48.0, spec, nominal_pitch=6.0)
        assert params.sections == 7
        assert params.pitch == pytest.approx(48.0 / 7)

    def test_default_pitch(self, spec) -> None:
        assert finger_layout(100.0, spec).sections == 9
        assert finger_layout(10.0, spec).sections == 3

    def test_too_short(self, spec) -> None:
        with pytest.raises(JointTooSmallError) as exc_info:
            finger_layout(5.0, spec)
        assert exc_info.value.code == "E_JOINT_TOO_SMALL"

    def test_spec_derived_widths(self, spec) -> None:
        assert spec.finger_compensation == pytest.approx(0.45)
        assert spec.slot_width == pytest.approx(3.25)
        assert spec.min_joint_length == pytest.approx(6.0)

    def test_zero_compensation_is_exact_fit(self) -> None:
        params = finger_layout(30.0, FabricationSpec(kerf=0.0, interference=0.0), nominal_pitch=6.0)
        assert params.w_f == params.w_d == params.w_h == pytest.approx(6.0)

    def test_slot_dimensions(self, spec) -> None:
        params = slot_parameters(40.0, spec)
        assert params.l_s == pytest.approx(20.0)
        assert params.w_s == pytest.approx(3.25)

    def test_width_identities(self) -> None:
        rng = np.random.default_rng(11)
        for _ in range(1000):
            spec = FabricationSpec(
                thickness=float(rng.uniform(2.0, 12.0)),
                kerf=float(rng.uniform(0.0, 0.3)),
                interference=float(rng.uniform(0.0, 0.3)),
            )
            length = float(rng.uniform(spec.min_joint_length, 1000.0))
            params = finger_layout(length, spec)
            c = 4.0 * spec.kerf + spec.interference
            assert params.w_f - params.w_d == pytest.approx(c, abs=1e-12)
            assert params.w_f - params.w_h == pytest.approx(c, abs=1e-12)
            assert params.w_s == pytest.approx(
                spec.thickness + 2.0 * spec.kerf + spec.interference, abs=1e-12
            )
            assert params.l_f == params.l_h == spec.thickness
            assert params.l_s == pytest.approx(length / 2.0, abs=1e-12)
            assert params.sections % 2 == 1 and params.sections >= 3
            assert params.sections * params.pitch == pytest.approx(length, rel=1e-12)


# ------------------------------------------------------------------
# Patterns
# ------------------------------------------------------------------


class TestFingerFinger:
    def test_complementary_fingers(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), Transform.identity()), ((30, 30), upright(0, 0, 0)))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        assert pattern.kind is JointKind.FINGER_FINGER
        assert pattern.parameters.sections == 5
        # b lies past a's edge, a lies across b's edge
        assert [e.op for e in pattern.boundary_edits_i] == [EditOp.ADD] * 3
        assert [e.op for e in pattern.boundary_edits_j] == [EditOp.CUT] * 3

        parts = apply_patterns(pm.parts, [pattern])
        # End fingers and end dents are clipped to the segment
        assert parts["a"].polygon.area == pytest.approx(900 + (2 * 6.1125 + 6.225) * 3)
        assert parts["b"].polygon.area == pytest.approx(900 - (2 * 5.8875 + 5.775) * 3)

    def test_fingers_reach_through_the_mate(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), Transform.identity()), ((30, 30), upright(0, 0, 0)))
        parts = apply_patterns(pm.parts, [pattern_for_record(only_record(pm), pm.parts, spec)])
        min_x, min_y, max_x, max_y = parts["a"].polygon.bounds
        assert min_y == pytest.approx(-3.0)
        assert (min_x, max_x, max_y) == pytest.approx((0.0, 30.0, 30.0))
        # Dents keep b inside its own outline
        assert parts["b"].polygon.bounds == pytest.approx((0.0, 0.0, 30.0, 30.0))

    def test_ring_vertices_per_feature(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), Transform.identity()), ((30, 30), upright(0, 0, 0)))
        parts = apply_patterns(pm.parts, [pattern_for_record(only_record(pm), pm.parts, spec)])
        # Four vertices for the middle feature, two for each one at a corner
        assert len(parts["a"].polygon.outer) == 4 + 4 + 2 * 2
        assert len(parts["b"].polygon.outer) == 4 + 4 + 2 * 2

    def test_fingers_meet_outside_both_parts(self, rectangle, spec) -> None:
        # b hangs below the line where it meets a, so each part protrudes into the other
        pm = placed_pair(rectangle, ((30, 30), Transform.identity()), ((30, 30), upright(0, 0, -30)))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        assert {e.op for e in pattern.boundary_edits_i} == {EditOp.ADD}
        assert {e.op for e in pattern.boundary_edits_j} == {EditOp.ADD}

    def test_oblique_parts_rejected(self, rectangle, spec) -> None:
        pm = placed_pair(
            rectangle, ((30, 30), Transform.identity()), ((30, 30), Transform.rot_x(60.0))
        )
        with pytest.raises(JointUnsupportedAngleError):
            pattern_for_record(only_record(pm), pm.parts, spec)


class TestSeamlessCorner:
    """The corner where two parts meet is filled exactly once."""

    SAMPLES = [0.1 + 0.2 * k for k in range(1000)]

    @staticmethod
    def owners(parts, point, thickness: float) -> list[str]:
        out = []
        for cid, part in sorted(parts.items()):
            x, y, z = part.placement.inverse().apply([point])[0]
            if 0.0 < z < thickness and part.polygon.to_shapely().contains(Point(x, y)):
                out.append(cid)
        return out

    def test_bookend_without_compensation(self, load_fixture, library) -> None:
        spec = FabricationSpec(kerf=0.0, interference=0.0)
        result = compile_design(load_fixture("bookend"), spec, library)
        parts = result.parts
        # The upright stands in y 147..150 on the base, which fills z 0..3
        for x in self.SAMPLES:
            assert len(self.owners(parts, (x, 148.5, 1.5), spec.thickness)) == 1, x
        assert parts["base"].polygon.bounds == pytest.approx((0.0, 0.0, 200.0, 150.0))
        assert parts["upright"].polygon.bounds == pytest.approx((0.0, 0.0, 200.0, 250.0))

    def test_bookend_with_interference_leaves_no_gap(self, compile_fixture, spec) -> None:
        parts = compile_fixture("bookend").parts
        for x in self.SAMPLES:
            assert self.owners(parts, (x, 148.5, 1.5), spec.thickness), x


class TestFingerHole:
    def test_fingers_and_holes(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), upright(20, 50, 0)), ((100, 100), Transform.identity()))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        assert pattern.kind is JointKind.FINGER_HOLE
        assert pattern.parameters.sections == 5
        # a passes through b: its fingers remain between two dents
        assert [e.op for e in pattern.boundary_edits_i] == [EditOp.CUT] * 2
        assert len(pattern.interior_cuts_j) == 3
        assert pattern.boundary_edits_j == pattern.interior_cuts_i == ()

        parts = apply_patterns(pm.parts, [pattern])
        assert parts["a"].polygon.area == pytest.approx(900 - 2 * 5.775 * 3)
        assert parts["b"].polygon.area == pytest.approx(10000 - (2 * 5.6625 + 5.775) * 3)
        assert len(parts["b"].polygon.holes) == 3

    def test_three_fingers_on_thirty_mm(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), upright(20, 50, 0)), ((100, 100), Transform.identity()))
        pattern = finger_hole_pattern(only_record(pm), pm.parts, spec, nominal_pitch=6.0)
        parts = apply_patterns(pm.parts, [pattern])
        fingers = parts["a"].polygon.to_shapely().intersection(box(0, 0, 30, 2))
        assert fingers.geom_type == "MultiPolygon"
        assert len(fingers.geoms) == 3

    def test_holes_span_the_edge_part(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), upright(20, 50, 0)), ((100, 100), Transform.identity()))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        for hole in pattern.interior_cuts_j:
            _, min_y, _, max_y = hole.bounds
            assert (min_y, max_y) == pytest.approx((47.0, 50.0))

    def test_roles_follow_classification(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((100, 100), Transform.identity()), ((30, 30), upright(20, 50, 0)))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        assert len(pattern.interior_cuts_i) == 3
        assert len(pattern.boundary_edits_j) == 2

    def test_hole_too_close_to_outline(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((30, 30), upright(20, 1, 0)), ((100, 100), Transform.identity()))
        with pytest.raises(JointPlacementError, match="breaches"):
            pattern_for_record(only_record(pm), pm.parts, spec)


class TestSlots:
    def test_cross_lap_halves(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((60, 60), upright(0, 30, -30)), ((60, 60), Transform.identity()))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        assert pattern.kind is JointKind.SLOT_SLOT
        assert pattern.parameters.w_s == pytest.approx(3.25)
        assert pattern.parameters.l_s == pytest.approx(30.0)
        assert [e.op for e in pattern.boundary_edits_i] == [EditOp.CUT]
        assert [e.op for e in pattern.boundary_edits_j] == [EditOp.CUT]

        parts = apply_patterns(pm.parts, [pattern])
        for cid in ("a", "b"):
            assert parts[cid].polygon.area == pytest.approx(3600 - 3.25 * 30)
            assert parts[cid].polygon.holes == ()

    def test_halves_open_from_opposite_sides(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((60, 60), upright(0, 30, -30)), ((60, 60), Transform.identity()))
        parts = apply_patterns(pm.parts, [pattern_for_record(only_record(pm), pm.parts, spec)])
        # Material left on either side of each slot covers the other half
        notch_a = pm.parts["a"].polygon.to_shapely().difference(parts["a"].polygon.to_shapely())
        notch_b = pm.parts["b"].polygon.to_shapely().difference(parts["b"].polygon.to_shapely())
        assert notch_a.centroid.x < 30 < notch_b.centroid.x

    def test_smaller_id_slots_from_parameter_zero(self, rectangle, spec) -> None:
        # Only the far end of a's segment and the near end of b's reach an outline
        parts = {cid: instantiate_component(rectangle, {"l": 60, "w": 60}, id=cid) for cid in ("a", "b")}
        record = IntersectionRecord(
            i="a",
            j="b",
            segment_3d=Segment3((0.0, 0.0, 0.0), (0.0, 0.0, 30.0)),
            segment_local_i=Segment2((30.0, 30.0), (30.0, 60.0)),
            segment_local_j=Segment2((30.0, 0.0), (30.0, 30.0)),
            classification=IntersectionClass.FACE_FACE,
        )
        pattern = pattern_for_record(record, parts, spec)
        assert pattern.boundary_edits_i == pattern.boundary_edits_j == ()
        (cut_i,) = pattern.interior_cuts_i
        (cut_j,) = pattern.interior_cuts_j
        assert cut_i.bounds == pytest.approx((28.375, 30.0, 31.625, 45.0))
        assert cut_j.bounds == pytest.approx((28.375, 15.0, 31.625, 30.0))

    def test_contained_crossing_single_slot(self, rectangle, spec) -> None:
        pm = placed_pair(rectangle, ((100, 100), Transform.identity()), ((20, 40), upright(40, 50, -20)))
        pattern = pattern_for_record(only_record(pm), pm.parts, spec)
        assert pattern.kind is JointKind.SLOT_SINGLE
        assert len(pattern.interior_cuts_i) == 1
        assert pattern.interior_cuts_j == pattern.boundary_edits_j == ()

        parts = apply_patterns(pm.parts, [pattern])
        assert parts["a"].polygon.area == pytest.approx(10000 - 3.25 * 20)
        assert parts["b"].polygon.area == pytest.approx(800)


class TestFlexHinge:
    def test_single_module(self, spec) -> None:
        pattern = flex_hinge_pattern("p", (0, 0, 40, 60), spec)
        assert pattern.kind is JointKind.FLEX_HINGE
        assert pattern.parameters.sections == 18
        assert len(pattern.interior_cuts_i) == 18

    def test_module_grid(self, spec) -> None:
        pattern = flex_hinge_pattern("p", (0, 0, 40, 60), spec, module_rows=2, module_cols=3)
        assert len(pattern.interior_cuts_i) == 2 * 3 * 5

    def test_slits_alternate(self, spec) -> None:
        cuts = flex_hinge_pattern("p", (0, 0, 40, 60), spec).interior_cuts_i
        assert cuts[0].bounds[1] == pytest.approx(1.5)
        assert cuts[1].bounds[1] == pytest.approx(3.0)
        assert cuts[1].bounds[3] == pytest.approx(58.5)

    def test_applied_to_part(self, rectangle, spec) -> None:
        part = instantiate_component(rectangle, {"l": 40, "w": 60}, id="p")
        parts = apply_patterns({"p": part}, [flex_hinge_pattern("p", (0, 0, 40, 60), spec)])
        assert parts["p"].polygon.area == pytest.approx(2400 - 18 * 0.5 * 55.5)

    def test_cuts_stay_inside_region(self, spec) -> None:
        cuts = flex_hinge_pattern("p", (0, 0, 20, 20), spec).interior_cuts_i
        assert len(cuts) == 8
        for cut in cuts:
            x0, y0, x1, y1 = cut.bounds
            assert 0 < x0 < x1 < 20 and 0 < y0 < y1 < 20

    def test_transverse_replicas(self, spec) -> None:
        cuts = flex_hinge_pattern("p", (0, 0, 60, 20), spec, module_cols=3).interior_cuts_i
        assert len(cuts) == 3 * 8
        for k in range(8):
            assert cuts[k + 8].bounds[0] - cuts[k].bounds[0] == pytest.approx(20.0)
            assert cuts[k + 16].bounds[0] - cuts[k + 8].bounds[0] == pytest.approx(20.0)

    def test_region_too_small(self, spec) -> None:
        with pytest.raises(JointTooSmallError):
            flex_hinge_pattern("p", (0, 0, 3, 60), spec)


# ------------------------------------------------------------------
# Application
# ------------------------------------------------------------------


class TestApplyPatterns:
    @pytest.fixture()
    def plate(self, rectangle):
        return {"p": instantiate_component(rectangle, {"l": 10, "w": 10}, id="p")}

    def test_separate_slots_remove_their_area(self, plate) -> None:
        patterns = [
            JointPattern(JointKind.SLOT_SINGLE, "x", "p", interior_cuts_i=(square(1, 1, 3, 4),)),
            JointPattern(JointKind.SLOT_SINGLE, "y", "p", interior_cuts_i=(square(6, 2, 8, 9),)),
        ]
        parts = apply_patterns(plate, patterns)
        assert parts["p"].polygon.area == pytest.approx(100 - 6 - 14)
        assert len(parts["p"].polygon.holes) == 2

    def test_addition_over_removal_conflicts(self, plate) -> None:
        patterns = [
            JointPattern(
                JointKind.FINGER_FINGER,
                "x",
                "p",
                boundary_edits_i=(BoundaryEdit(EditOp.ADD, square(-2, 2, 3, 5)),),
            ),
            JointPattern(JointKind.SLOT_SINGLE, "y", "p", interior_cuts_i=(square(1, 1, 4, 8),)),
        ]
        with pytest.raises(JointConflictError) as exc_info:
            apply_patterns(plate, patterns)
        assert exc_info.value.code == "E_JOINT_CONFLICT"
        assert (exc_info.value.first, exc_info.value.second) == ("x", "y")

    def test_overlapping_removals_merge(self, plate) -> None:
        patterns = [
            JointPattern(JointKind.SLOT_SINGLE, "x", "p", interior_cuts_i=(square(2, 2, 5, 5),)),
            JointPattern(JointKind.SLOT_SINGLE, "y", "p", interior_cuts_i=(square(4, 4, 7, 7),)),
        ]
        parts = apply_patterns(plate, patterns)
        assert parts["p"].polygon.area == pytest.approx(100 - 9 - 9 + 1)
        assert len(parts["p"].polygon.holes) == 1

    def test_two_segments_of_one_pair_conflict(self, plate) -> None:
        first = Segment3((0.0, 0.0, 0.0), (10.0, 0.0, 0.0))
        second = Segment3((0.0, 10.0, 0.0), (10.0, 10.0, 0.0))
        patterns = [
            JointPattern(
                JointKind.FINGER_FINGER,
                "p × q",
                "p",
                "q",
                boundary_edits_i=(BoundaryEdit(EditOp.ADD, square(-2, 2, 3, 5)),),
                segment=first,
            ),
            JointPattern(
                JointKind.FINGER_FINGER,
                "p × q",
                "p",
                "q",
                boundary_edits_i=(BoundaryEdit(EditOp.CUT, square(-1, 1, 4, 4)),),
                segment=second,
            ),
        ]
        with pytest.raises(JointConflictError) as exc_info:
            apply_patterns(plate, patterns)
        assert exc_info.value.first != exc_info.value.second
        assert exc_info.value.first.startswith("p × q at (5.000, 0.000")

    def test_edits_of_one_joint_may_touch(self, plate) -> None:
        pattern = JointPattern(
            JointKind.SLOT_SINGLE,
            "x",
            "p",
            interior_cuts_i=(square(2, 2, 5, 5), square(4, 4, 7, 7)),
        )
        parts = apply_patterns(plate, [pattern])
        assert parts["p"].polygon.area == pytest.approx(100 - 9 - 9 + 1)

    def test_cut_that_splits_part(self, plate) -> None:
        pattern = JointPattern(
            JointKind.SLOT_SLOT,
            "x",
            "p",
            boundary_edits_i=(BoundaryEdit(EditOp.CUT, square(-1, 4, 11, 6)),),
        )
        with pytest.raises(JointPlacementError):
            apply_patterns(plate, [pattern])

    def test_untouched_parts_are_kept(self, plate) -> None:
        assert apply_patterns(plate, []) == plate

    @pytest.mark.parametrize("name", ["bookend", "reading_desk", "stool"])
    def test_fixture_parts_stay_simple(self, name, compile_fixture) -> None:
        result = compile_fixture(name)
        for part in result.parts.values():
            shape = part.polygon.to_shapely()
            assert shape.is_valid and shape.geom_type == "Polygon"
