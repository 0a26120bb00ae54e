"""Lowering passes: placement, intersection detection, joint synthesis."""

from __future__ import annotations

from flatpack.passes.intersect import (
    IntersectionClass,
    IntersectionRecord,
    classify_and_assign,
    find_intersection_segments,
    merge_coplanar,
    on_edge,
)
from flatpack.passes.joints import (
    JointKind,
    JointParameters,
    JointPattern,
    apply_patterns,
    finger_finger_pattern,
    finger_hole_pattern,
    finger_layout,
    flex_hinge_pattern,
    slot_parameters,
    slot_slot_pattern,
)
from flatpack.passes.pipeline import (
    CompilePipeline,
    CompileReport,
    CompileResult,
    compile_design,
    compile_file,
    synthesize_joints,
)
from flatpack.passes.placement import (
    PlacedModel,
    edge_frame,
    find_relative_transform,
    place_components,
    reverse_connection,
)

__all__ = [
    "CompilePipeline",
    "CompileReport",
    "CompileResult",
    "IntersectionClass",
    "IntersectionRecord",
    "JointKind",
    "JointParameters",
    "JointPattern",
    "PlacedModel",
    "apply_patterns",
    "classify_and_assign",
    "compile_design",
    "compile_file",
    "edge_frame",
    "find_intersection_segments",
    "find_relative_transform",
    "finger_finger_pattern",
    "finger_hole_pattern",
    "finger_layout",
    "flex_hinge_pattern",
    "merge_coplanar",
    "on_edge",
    "place_components",
    "reverse_connection",
    "slot_parameters",
    "slot_slot_pattern",
    "synthesize_joints",
]
