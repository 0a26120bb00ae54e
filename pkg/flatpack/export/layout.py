"""Sheet layout: first-fit-decreasing-height shelf packing of finished parts.

Each part is packed as its axis-aligned bounding box grown by the spacing,
so neighbouring outlines keep at least ``spacing`` between them and every
part keeps ``spacing / 2`` to the sheet border. Parts lie with their longer
side along the sheet width when that fits, otherwise they are turned 90°.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from flatpack.core.fabrication import FabricationSpec
from flatpack.design.component import ComponentInstance
from flatpack.design.model import part_sort_key
from flatpack.exceptions import PartTooLargeError
from flatpack.geometry import Polygon2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SheetPlacement:
    """Where one part lands: rotate about the local origin, then translate."""

    part_id: str
    sheet: int
    rotation: int  # degrees, 0 or 90
    translation: tuple[float, float]
    origin: tuple[float, float]  # lower-left corner of the bounding box
    size: tuple[float, float]

    def apply(self, polygon: Polygon2) -> Polygon2:
        """Part outline in sheet coordinates."""

        def move(ring):
            pts = np.asarray(ring, dtype=float)
            if self.rotation == 90:
                pts = np.column_stack([-pts[:, 1], pts[:, 0]])
            return [tuple(p) for p in pts + np.asarray(self.translation)]

        return Polygon2(
            outer=tuple(move(polygon.outer)),
            holes=tuple(tuple(move(h)) for h in polygon.holes),
        )

    @property
    def box(self) -> tuple[float, float, float, float]:
        """Sheet-space bounding box (x0, y0, x1, y1)."""
        x0, y0 = self.origin
        return x0, y0, x0 + self.size[0], y0 + self.size[1]


@dataclass(frozen=True)
class SheetLayout:
    width: float
    height: float
    spacing: float
    sheets: tuple[tuple[SheetPlacement, ...], ...]

    @property
    def sheet_count(self) -> int:
        return len(self.sheets)

    def placements(self) -> dict[str, SheetPlacement]:
        return {p.part_id: p for sheet in self.sheets for p in sheet}


@dataclass
class _Shelf:
    sheet: int
    y: float
    height: float
    used: float = 0.0


def _orientation(
    part_id: str, width: float, height: float, sheet: tuple[float, float], spacing: float
) -> tuple[int, float, float]:
    """Rotation and footprint for one part, long side horizontal when possible."""
    options = [(0, width, height), (90, height, width)]
    options.sort(key=lambda o: (o[2] > o[1], o[0]))
    for rotation, w, h in options:
        if w + spacing <= sheet[0] and h + spacing <= sheet[1]:
            return rotation, w, h
    raise PartTooLargeError(part_id, (width, height), sheet)


def layout_sheets(
    parts: Mapping[str, ComponentInstance], spec: FabricationSpec
) -> SheetLayout:
    """Pack every part onto as few sheets as the shelf policy allows.

    Parts are taken by decreasing footprint height, ties broken by
    part_sort_key, so the result depends only on the part set and the
    fabrication spec.

    Raises:
        PartTooLargeError: If a part fits the sheet in neither rotation.
    """
    sheet = (spec.sheet_width, spec.sheet_height)
    gap = spec.spacing
    items = []
    for part_id in sorted(parts, key=part_sort_key):
        x0, y0, x1, y1 = parts[part_id].polygon.bounds
        rotation, w, h = _orientation(part_id, x1 - x0, y1 - y0, sheet, gap)
        items.append((part_id, rotation, w, h))
    items.sort(key=lambda item: (-round(item[3], 9), part_sort_key(item[0])))

    shelves: list[_Shelf] = []
    filled: list[float] = []  # used height per sheet
    placed: list[list[SheetPlacement]] = []
    for part_id, rotation, w, h in items:
        fw, fh = w + gap, h + gap
        shelf = next(
            (s for s in shelves if s.used + fw <= sheet[0] and fh <= s.height), None
        )
        if shelf is None:
            index = next(
                (i for i, used in enumerate(filled) if used + fh <= sheet[1]), None
            )
            if index is None:
                filled.append(0.0)
                placed.append([])
                index = len(filled) - 1
            shelf = _Shelf(sheet=index, y=filled[index], height=fh)
            filled[index] += fh
            shelves.append(shelf)

        ox, oy = shelf.used + gap / 2.0, shelf.y + gap / 2.0
        shelf.used += fw
        x0, y0, _, y1 = parts[part_id].polygon.bounds
        if rotation == 90:
            # A quarter turn maps (x, y) to (-y, x), so the new minimum x is -y1
            translation = (ox + y1, oy - x0)
        else:
            translation = (ox - x0, oy - y0)
        placed[shelf.sheet].append(
            SheetPlacement(
                part_id=part_id,
                sheet=shelf.sheet,
                rotation=rotation,
                translation=translation,
                origin=(ox, oy),
                size=(w, h),
            )
        )

    sheets = tuple(
        tuple(sorted(s, key=lambda p: part_sort_key(p.part_id))) for s in placed
    )
    logger.info("Laid out %d parts on %d sheets", len(parts), len(sheets))
    return SheetLayout(width=sheet[0], height=sheet[1], spacing=gap, sheets=sheets)
