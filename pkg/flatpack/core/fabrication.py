"""Fabrication specification: material, machine compensation and sheet stock."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from flatpack.core.config import settings
from flatpack.exceptions import SchemaError

logger = logging.getLogger(__name__)


class FabricationSpec(BaseModel):
    """Material thickness w_m, kerf, interference fit and sheet stock (all mm)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    material: str = "plywood"
    thickness: float = Field(default=3.0, gt=0)
    kerf: float = Field(default=0.1, ge=0)
    interference: float = Field(default=0.05, ge=0)
    sheet_width: float = Field(default=1200.0, gt=0)
    sheet_height: float = Field(default=900.0, gt=0)
    spacing: float = Field(default=5.0, ge=0)
    hinge_beam_width: float = Field(default=1.5, gt=0)
    hinge_gap: float = Field(default=0.5, gt=0)
    min_joint_factor: float = Field(default=2.0, gt=0)
    right_angle_tolerance_deg: float = Field(default=1.0, ge=0)

    @property
    def min_joint_length(self) -> float:
        """Shortest intersection segment that can host a joint."""
        return self.min_joint_factor * self.thickness

    @property
    def finger_compensation(self) -> float:
        """Width difference between a finger and its mating dent or hole."""
        return 4.0 * self.kerf + self.interference

    @property
    def slot_width(self) -> float:
        """Slot width w_s = w_m + 2 kerf + interference."""
        return self.thickness + 2.0 * self.kerf + self.interference

    @classmethod
    def defaults(cls) -> FabricationSpec:
        """Build a spec from the environment-backed settings."""
        return cls(
            material=settings.material,
            thickness=settings.thickness,
            kerf=settings.kerf,
            interference=settings.fit,
            sheet_width=settings.sheet_width,
            sheet_height=settings.sheet_height,
            spacing=settings.spacing,
            hinge_beam_width=settings.hinge_beam_width,
            hinge_gap=settings.hinge_gap,
            min_joint_factor=settings.min_joint_factor,
            right_angle_tolerance_deg=settings.right_angle_tolerance_deg,
        )

    @classmethod
    def resolve(
        cls,
        spec_file: Path | None = None,
        overrides: dict[str, Any] | None = None,
    ) -> FabricationSpec:
        """Merge defaults, spec-file values and overrides, in rising precedence.

        Args:
            spec_file: Optional YAML file with FabricationSpec field names.
            overrides: Values from command-line flags; None entries are skipped.

        Returns:
            Validated FabricationSpec.

        Raises:
            SchemaError: If the file or an override violates the field rules.
        """
        values = cls.defaults().model_dump()
        if spec_file is not None:
            loaded = yaml.safe_load(Path(spec_file).read_text(encoding="utf-8")) or {}
            if not isinstance(loaded, dict):
                raise SchemaError("fabrication spec must be a mapping", "/")
            values.update(loaded)
            logger.debug("Loaded fabrication spec from %s", spec_file)
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            first = e.errors()[0]
            path = "/" + "/".join(str(p) for p in first["loc"])
            raise SchemaError(first["msg"], path) from e
