"""Placement pass: global rigid transforms from the connection graph.

Every interface edge defines a local edge frame: origin at the edge midpoint,
x along the edge in ring order, z along the part's front normal and y = z x x,
which points into the part. A connection A -> B is realized by aligning A's
edge frame with B's (x anti-parallel), then offsetting in B's local axes and
finally rotating about A's aligned axes (x, then y, then z).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from flatpack.design.component import ComponentInstance
from flatpack.design.flatten import FlatDesign
from flatpack.design.model import Alignment, Connection
from flatpack.exceptions import (
    DesignReferenceError,
    DisconnectedDesignError,
    EmptyDesignError,
    OverConstrainedError,
)
from flatpack.geometry import EPS_ANGLE, Transform

logger = logging.getLogger(__name__)

# Agreement required when a graph cycle reaches an already placed part
CYCLE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PlacedModel:
    """Flat design with a placement on every part."""

    design: FlatDesign
    parts: Mapping[str, ComponentInstance]
    # Connection labels leading from the seed to each part
    provenance: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    seed: str = ""
    # Absorbed part id -> surviving part id, filled by the coplanar merge
    merged: Mapping[str, str] = field(default_factory=dict)

    def resolve(self, part_id: str) -> str:
        """Id of the part that now carries ``part_id``'s material."""
        while part_id in self.merged:
            part_id = self.merged[part_id]
        return part_id

    @property
    def connections(self) -> tuple[Connection, ...]:
        return self.design.connections

    def placement(self, part_id: str) -> Transform:
        placement = self.parts[part_id].placement
        assert placement is not None
        return placement

    def relative(self, first: str, second: str) -> Transform:
        """Transform taking ``first``'s local frame into ``second``'s."""
        return self.placement(second).inverse() @ self.placement(first)


def edge_frame(part: ComponentInstance, interface: str) -> Transform:
    """Local frame of an interface edge, expressed in the part's local frame."""
    a, b = part.interface_edge(interface)
    x = np.append((b - a) / np.linalg.norm(b - a), 0.0)
    z = np.array([0.0, 0.0, 1.0])
    y = np.cross(z, x)
    origin = np.append((a + b) / 2.0, 0.0)
    return Transform.from_frame(origin, x, y, z)


def find_relative_transform(
    conn: Connection, a: ComponentInstance, b: ComponentInstance
) -> Transform:
    """Transform T with T_A = T_B . T for the connection A -> B.

    Raises:
        DegenerateInterfaceError: If either interface edge has zero length.
        DesignReferenceError: If either interface does not exist.
    """
    frame_a = edge_frame(a, conn.connecting[1])
    frame_b = edge_frame(b, conn.connected[1])
    offset = Transform.translation(*conn.offset)
    rotation = Transform.rot_xyz(*conn.rotation)
    return offset @ frame_b @ _alignment_flip(conn.alignment) @ rotation @ frame_a.inverse()


def _alignment_flip(alignment: Alignment | str) -> Transform:
    """Half turn turning A's edge frame onto B's; each is its own inverse."""
    if Alignment(alignment) is Alignment.FRONT_FRONT:
        return Transform.rot_z(180.0)
    return Transform.rot_y(180.0)


def xyz_angles(rotation: np.ndarray) -> tuple[float, float, float]:
    """Intrinsic x, y, z angles in degrees with rot_xyz(*angles) == rotation."""
    sin_y = float(np.clip(rotation[0, 2], -1.0, 1.0))
    ry = np.arcsin(sin_y)
    if abs(sin_y) < 1.0 - EPS_ANGLE:
        rx = np.arctan2(-rotation[1, 2], rotation[2, 2])
        rz = np.arctan2(-rotation[0, 1], rotation[0, 0])
    else:
        # Gimbal lock: the z turn folds into x
        rx = np.arctan2(rotation[2, 1], rotation[1, 1])
        rz = 0.0
    return tuple(float(np.degrees(v)) + 0.0 for v in (rx, ry, rz))


def reverse_connection(
    conn: Connection, a: ComponentInstance, b: ComponentInstance
) -> Connection:
    """The connection B -> A realizing the same relative placement as ``conn``.

    The alignment is kept; the rotation becomes F R^-1 F for the alignment
    half turn F and the offset is re-expressed in A's local axes.
    """
    forward = find_relative_transform(conn, a, b)
    flip = _alignment_flip(conn.alignment)
    rotation = flip @ Transform.rot_xyz(*conn.rotation).inverse() @ flip
    offset = -forward.inverse().rotation @ np.asarray(conn.offset, dtype=float)
    return replace(
        conn,
        connecting=conn.connected,
        connected=conn.connecting,
        offset=tuple(float(v) + 0.0 for v in offset),
        rotation=xyz_angles(rotation.rotation),
    )


def place_components(design: FlatDesign, seed: str | None = None) -> PlacedModel:
    """Depth-first placement from ``seed``, by default the first id by part_sort_key.

    Raises:
        EmptyDesignError: If the design has no components.
        DisconnectedDesignError: If the connectivity graph has several islands.
        OverConstrainedError: If a cycle implies a conflicting placement.
    """
    ids = design.ids
    if not ids:
        raise EmptyDesignError(design.name)
    islands = design.islands()
    if len(islands) > 1:
        raise DisconnectedDesignError(islands)

    incident: dict[str, list[int]] = {cid: [] for cid in ids}
    for index, conn in enumerate(design.connections):
        incident[conn.connecting[0]].append(index)
        incident[conn.connected[0]].append(index)

    seed = seed if seed is not None else ids[0]
    if seed not in design.components:
        raise DesignReferenceError(f"Unknown seed component '{seed}'")
    placements: dict[str, Transform] = {seed: Transform.identity()}
    provenance: dict[str, tuple[str, ...]] = {seed: ()}
    relative_cache: dict[int, Transform] = {}
    stack = [seed]
    while stack:
        node = stack.pop()
        current = placements[node]
        for index in incident[node]:
            conn = design.connections[index]
            if index not in relative_cache:
                relative_cache[index] = find_relative_transform(
                    conn,
                    design.components[conn.connecting[0]],
                    design.components[conn.connected[0]],
                )
            rel = relative_cache[index]
            if conn.connected[0] == node:
                child, implied = conn.connecting[0], current @ rel
            else:
                child, implied = conn.connected[0], current @ rel.inverse()
            if not implied.is_rigid(EPS_ANGLE):
                implied = implied.orthonormalized()
            if child in placements:
                deviation = placements[child].max_deviation(implied)
                if deviation > CYCLE_TOLERANCE:
                    raise OverConstrainedError(conn.label, deviation)
                continue
            placements[child] = implied
            provenance[child] = (*provenance[node], conn.label)
            stack.append(child)

    parts = {cid: design.components[cid].with_placement(placements[cid]) for cid in ids}
    logger.info("Placed %d parts from seed %s", len(parts), seed)
    return PlacedModel(design=design, parts=parts, provenance=provenance, seed=seed)
