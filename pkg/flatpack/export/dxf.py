"""DXF R12 cut files: one closed POLYLINE per contour on layer CUT."""

from __future__ import annotations

import io
import logging
from typing import Mapping

import ezdxf
from ezdxf import units

from flatpack.design.component import ComponentInstance
from flatpack.export.base import EmitContext, EmittedFile, FabricationEmitter
from flatpack.export.layout import SheetLayout

logger = logging.getLogger(__name__)

CUT_LAYER = "CUT"
DXF_VERSION = "R12"


def _rounded(ring) -> list[tuple[float, float]]:
    return [(round(x, 3) + 0.0, round(y, 3) + 0.0) for x, y in ring]


def emit_dxf(layout: SheetLayout, parts: Mapping[str, ComponentInstance]) -> list[str]:
    """DXF text of every sheet, in sheet order.

    Holes and slots are separate closed polylines after their part's outline.
    """
    documents = []
    previous = ezdxf.options.write_fixed_meta_data_for_testing
    ezdxf.options.write_fixed_meta_data_for_testing = True
    try:
        for sheet in layout.sheets:
            doc = ezdxf.new(DXF_VERSION)
            doc.units = units.MM
            doc.layers.add(CUT_LAYER)
            msp = doc.modelspace()
            for placement in sheet:
                outline = placement.apply(parts[placement.part_id].polygon)
                for ring in outline.rings():
                    msp.add_polyline2d(
                        _rounded(ring), close=True, dxfattribs={"layer": CUT_LAYER}
                    )
            stream = io.StringIO()
            doc.write(stream)
            documents.append(stream.getvalue())
    finally:
        ezdxf.options.write_fixed_meta_data_for_testing = previous
    return documents


class DxfEmitter(FabricationEmitter):
    """Export sheets to DXF R12."""

    @property
    def file_extension(self) -> str:
        return "dxf"

    def emit(self, context: EmitContext) -> list[EmittedFile]:
        documents = emit_dxf(context.layout, context.parts)
        logger.debug("Rendered %d DXF sheets", len(documents))
        return [
            EmittedFile(self.generate_filename(context.design_name, i), text.encode("utf-8"))
            for i, text in enumerate(documents)
        ]
