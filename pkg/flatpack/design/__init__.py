"""Design front end: templates, expressions, hierarchical models and persistence."""

from __future__ import annotations

from flatpack.design.component import ComponentInstance, instantiate_component
from flatpack.design.constraints import ConstraintExpr, evaluate_constraints
from flatpack.design.expressions import (
    evaluate,
    format_expression,
    parse_expression,
)
from flatpack.design.flatten import FlatDesign, flatten
from flatpack.design.library import TemplateLibrary, get_library
from flatpack.design.model import (
    Alignment,
    ComponentDecl,
    Connection,
    DesignModel,
    HingeDecl,
    Include,
    ParameterDecl,
    compose,
    make_connection,
    part_sort_key,
)
from flatpack.design.persistence import load_design, save_design
from flatpack.design.templates import BUILTIN_TEMPLATES, ComponentTemplate, ParameterSpec
from flatpack.design.validation import Diagnostic, validate_design

__all__ = [
    "Alignment",
    "BUILTIN_TEMPLATES",
    "ComponentDecl",
    "ComponentInstance",
    "ComponentTemplate",
    "Connection",
    "ConstraintExpr",
    "DesignModel",
    "Diagnostic",
    "FlatDesign",
    "HingeDecl",
    "Include",
    "ParameterDecl",
    "ParameterSpec",
    "TemplateLibrary",
    "compose",
    "evaluate",
    "evaluate_constraints",
    "flatten",
    "format_expression",
    "get_library",
    "instantiate_component",
    "load_design",
    "make_connection",
    "parse_expression",
    "part_sort_key",
    "save_design",
    "validate_design",
]
