"""Binary STL preview of the assembled design.

Parts keep their global placement, so joint material of mating parts
overlaps in the preview. Each part is a separate watertight shell.
"""

from __future__ import annotations

import logging
from typing import Mapping

import trimesh

from flatpack.core.fabrication import FabricationSpec
from flatpack.design.component import ComponentInstance
from flatpack.design.model import part_sort_key
from flatpack.exceptions import MeshError
from flatpack.export.base import EmitContext, EmittedFile, FabricationEmitter
from flatpack.geometry import extrude_polygon

logger = logging.getLogger(__name__)


def part_meshes(
    parts: Mapping[str, ComponentInstance], spec: FabricationSpec
) -> dict[str, trimesh.Trimesh]:
    """One prism per part, in part_sort_key order.

    Raises:
        MeshError: Naming the part whose final polygon cannot be extruded.
    """
    return {
        part_id: extrude_polygon(
            parts[part_id].polygon,
            spec.thickness,
            parts[part_id].placement,
            part_id=part_id,
        )
        for part_id in sorted(parts, key=part_sort_key)
    }


def emit_stl(parts: Mapping[str, ComponentInstance], spec: FabricationSpec) -> bytes:
    """Binary STL of every part in its global placement.

    Raises:
        MeshError: If there is no part to export or a part cannot be extruded.
    """
    if not parts:
        raise MeshError("No parts to export")
    meshes = list(part_meshes(parts, spec).values())
    combined = trimesh.util.concatenate(meshes) if len(meshes) > 1 else meshes[0]
    data = trimesh.exchange.stl.export_stl(combined)
    logger.debug("Rendered STL with %d triangles", len(combined.faces))
    return data


class StlEmitter(FabricationEmitter):
    """Export the assembled pose to binary STL."""

    @property
    def file_extension(self) -> str:
        return "stl"

    def emit(self, context: EmitContext) -> list[EmittedFile]:
        data = emit_stl(context.parts, context.spec)
        return [EmittedFile(self.generate_filename(context.design_name), data)]
