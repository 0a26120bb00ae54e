"""Abstract base class for fabrication emitters.

Defines the interface that all output format implementations must follow.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from flatpack.core.fabrication import FabricationSpec
    from flatpack.design.component import ComponentInstance
    from flatpack.export.layout import SheetLayout


@dataclass(frozen=True)
class EmitContext:
    """Everything an emitter may read; emitters never modify it."""

    design_name: str
    parts: Mapping[str, ComponentInstance]
    layout: SheetLayout
    spec: FabricationSpec


@dataclass(frozen=True)
class EmittedFile:
    name: str
    data: bytes


class FabricationEmitter(ABC):
    """Abstract base class for fabrication emitters."""

    @property
    @abstractmethod
    def file_extension(self) -> str:
        """File extension for the output format."""
        pass

    @abstractmethod
    def emit(self, context: EmitContext) -> list[EmittedFile]:
        """Generate output files for a compiled design.

        Args:
            context: Finished parts, their sheet layout and the fabrication spec

        Returns:
            Files in a stable order, each with its final name

        Raises:
            MeshError: If a part cannot be turned into a solid (3D formats)
        """
        pass

    def generate_filename(self, design_name: str, sheet: int | None = None) -> str:
        """``<design>-sheet<N>.<ext>`` for sheet outputs, ``<design>.<ext>`` otherwise.

        Sheets are numbered from 1 in file names.
        """
        if sheet is None:
            return f"{design_name}.{self.file_extension}"
        return f"{design_name}-sheet{sheet + 1}.{self.file_extension}"
