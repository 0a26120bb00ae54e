"""Prism extrusion of planar parts for the 3D preview."""

from __future__ import annotations

import logging

import trimesh

from flatpack.exceptions import MeshError
from flatpack.geometry.base import Polygon2
from flatpack.geometry.transforms import Transform

logger = logging.getLogger(__name__)


def extrude_polygon(
    poly: Polygon2,
    thickness: float,
    placement: Transform | None = None,
    *,
    part_id: str | None = None,
) -> trimesh.Trimesh:
    """Extrude ``poly`` over local z in [0, thickness] and apply ``placement``.

    Returns:
        Watertight, outward-oriented triangle mesh.

    Raises:
        MeshError: If thickness is not positive or the polygon is not simple.
    """
    if thickness <= 0:
        raise MeshError(f"thickness must be positive, got {thickness}", part_id)
    shape = poly.to_shapely()
    if not shape.is_valid:
        raise MeshError("polygon is not simple", part_id)
    try:
        mesh = trimesh.creation.extrude_polygon(shape, thickness, engine="earcut")
    except Exception as e:
        raise MeshError(f"triangulation failed: {e}", part_id) from e
    if placement is not None:
        mesh.apply_transform(placement.matrix)
    if not mesh.is_watertight:
        raise MeshError("extruded mesh is not watertight", part_id)
    logger.debug("Extruded %s into %d triangles", part_id or "polygon", len(mesh.faces))
    return mesh
