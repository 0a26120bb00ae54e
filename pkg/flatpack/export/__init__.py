"""Fabrication output module.

Provides the sheet layout and emitters for the cut files (SVG, DXF) and
the 3D preview (STL).
"""

from __future__ import annotations

from flatpack.exceptions import UnsupportedFormatError
from flatpack.export.base import EmitContext, EmittedFile, FabricationEmitter
from flatpack.export.dxf import DxfEmitter, emit_dxf
from flatpack.export.layout import SheetLayout, SheetPlacement, layout_sheets
from flatpack.export.stl import StlEmitter, emit_stl, part_meshes
from flatpack.export.svg import SvgEmitter, emit_svg

_EMITTERS: dict[str, type[FabricationEmitter]] = {
    "svg": SvgEmitter,
    "dxf": DxfEmitter,
    "stl": StlEmitter,
}

DEFAULT_FORMATS = ("svg", "dxf", "stl")


def available_formats() -> list[str]:
    return list(_EMITTERS)


def get_emitter(format: str) -> FabricationEmitter:
    """Factory function to get the emitter for an output format.

    Args:
        format: Format name (svg, dxf or stl), case-insensitive

    Returns:
        An instance of the matching FabricationEmitter

    Raises:
        UnsupportedFormatError: If format is not supported
    """
    emitter_class = _EMITTERS.get(format.strip().lower())
    if emitter_class is None:
        raise UnsupportedFormatError(format, available_formats())
    return emitter_class()


__all__ = [
    "DEFAULT_FORMATS",
    "DxfEmitter",
    "EmitContext",
    "EmittedFile",
    "FabricationEmitter",
    "SheetLayout",
    "SheetPlacement",
    "StlEmitter",
    "SvgEmitter",
    "available_formats",
    "emit_dxf",
    "emit_stl",
    "emit_svg",
    "get_emitter",
    "layout_sheets",
    "part_meshes",
]
