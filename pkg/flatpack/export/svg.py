"""SVG cut files, one document per sheet.

Each part becomes a single path: the outer ring followed by one subpath per
hole or slot, filled even-odd and stroked only. User units are millimeters
and the y axis is flipped so sheets read the same way as in the DXF output.
"""

from __future__ import annotations

import io
import logging
from typing import Mapping

import svgwrite

from flatpack.design.component import ComponentInstance
from flatpack.export.base import EmitContext, EmittedFile, FabricationEmitter
from flatpack.export.layout import SheetLayout

logger = logging.getLogger(__name__)

STROKE_WIDTH = 0.1  # mm, hairline for laser cutters


def fmt(value: float) -> str:
    """Coordinate text rounded to 1e-3 mm without trailing zeros."""
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def path_data(rings, sheet_height: float) -> str:
    commands = []
    for ring in rings:
        head, *tail = ring
        commands.append(f"M {fmt(head[0])},{fmt(sheet_height - head[1])}")
        commands.extend(f"L {fmt(x)},{fmt(sheet_height - y)}" for x, y in tail)
        commands.append("Z")
    return " ".join(commands)


def emit_svg(layout: SheetLayout, parts: Mapping[str, ComponentInstance]) -> list[str]:
    """SVG text of every sheet, in sheet order."""
    documents = []
    for sheet in layout.sheets:
        drawing = svgwrite.Drawing(
            size=(f"{fmt(layout.width)}mm", f"{fmt(layout.height)}mm"),
            viewBox=f"0 0 {fmt(layout.width)} {fmt(layout.height)}",
            profile="full",
            debug=False,
        )
        for placement in sheet:
            outline = placement.apply(parts[placement.part_id].polygon)
            path = drawing.path(
                d=path_data(outline.rings(), layout.height),
                id=placement.part_id.replace("/", "."),
                fill="none",
                stroke="black",
                stroke_width=STROKE_WIDTH,
            )
            path["fill-rule"] = "evenodd"
            drawing.add(path)
        buffer = io.StringIO()
        drawing.write(buffer, pretty=True, indent=2)
        documents.append(buffer.getvalue())
    return documents


class SvgEmitter(FabricationEmitter):
    """Export sheets to SVG."""

    @property
    def file_extension(self) -> str:
        return "svg"

    def emit(self, context: EmitContext) -> list[EmittedFile]:
        documents = emit_svg(context.layout, context.parts)
        logger.debug("Rendered %d SVG sheets", len(documents))
        return [
            EmittedFile(self.generate_filename(context.design_name, i), text.encode("utf-8"))
            for i, text in enumerate(documents)
        ]
