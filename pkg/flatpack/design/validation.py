"""Front-end checks without any geometry pass, reported as diagnostics."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

from flatpack.design.flatten import FlatDesign, flatten
from flatpack.design.library import TemplateLibrary
from flatpack.design.persistence import load_design
from flatpack.exceptions import DisconnectedDesignError, EmptyDesignError, FlatpackError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    path: str
    message: str

    @classmethod
    def from_error(cls, error: FlatpackError, severity: str = "error") -> Diagnostic:
        return cls(severity, error.code, error.path or "/", str(error))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def check_connectivity(flat: FlatDesign) -> None:
    """Raises EmptyDesignError or DisconnectedDesignError unless one island remains."""
    if not flat.components:
        raise EmptyDesignError(flat.name)
    islands = flat.islands()
    if len(islands) > 1:
        raise DisconnectedDesignError(islands)


def validate_design(path: Path, library: TemplateLibrary | None = None) -> list[Diagnostic]:
    """Schema, reference, constraint-cycle and connectivity checks.

    Returns:
        Diagnostics in the order found; empty for a valid design.
    """
    diagnostics: list[Diagnostic] = []
    try:
        flat = flatten(load_design(Path(path), library=library), library)
        check_connectivity(flat)
    except FlatpackError as e:
        diagnostics.append(Diagnostic.from_error(e))
    logger.info("Validated %s: %d diagnostics", path, len(diagnostics))
    return diagnostics
