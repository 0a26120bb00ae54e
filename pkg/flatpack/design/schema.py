"""Pydantic schema of design and library documents (format version 1)."""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from flatpack.design.templates import MAX_LENGTH, MIN_LENGTH
from flatpack.exceptions import SchemaError, VersionMismatchError

FORMAT_VERSION = 1

Scalar = Union[float, str]


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamBoundsDoc(_Doc):
    min: float = MIN_LENGTH
    max: float = MAX_LENGTH


class TemplateDoc(_Doc):
    """Custom template: parameters with bounds, vertex expressions, interfaces."""

    params: dict[str, ParamBoundsDoc] = Field(default_factory=dict)
    vertices: list[tuple[Scalar, Scalar]] = Field(min_length=3)
    interfaces: dict[str, int] = Field(default_factory=dict)


class ParameterDoc(_Doc):
    value: float
    min: Optional[float] = None
    max: Optional[float] = None


class ComponentDoc(_Doc):
    id: str = Field(min_length=1, pattern=r"^[A-Za-z_][A-Za-z0-9_]*$")
    template: str
    bindings: dict[str, Scalar] = Field(default_factory=dict)


class ConnectionDoc(_Doc):
    connecting: tuple[str, str]
    connected: tuple[str, str]
    alignment: Literal["ff", "fb"] = "ff"
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotation: tuple[float, float, float] = (0.0, 0.0, 0.0)


class IncludeDoc(_Doc):
    """Nested model, either a file reference or an inline design."""

    alias: str = Field(min_length=1, pattern=r"^[A-Za-z_][A-Za-z0-9_]*$")
    file: Optional[str] = None
    design: Optional[dict[str, Any]] = None
    bindings: dict[str, Scalar] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _one_source(self) -> IncludeDoc:
        if (self.file is None) == (self.design is None):
            raise ValueError("include needs exactly one of 'file' or 'design'")
        return self


class HingeDoc(_Doc):
    component: str
    region: tuple[float, float, float, float]
    rows: int = Field(default=1, ge=1)
    cols: int = Field(default=1, ge=1)


class DesignDoc(_Doc):
    flatpack: int
    name: Optional[str] = None
    templates: dict[str, TemplateDoc] = Field(default_factory=dict)
    parameters: dict[str, Union[ParameterDoc, float]] = Field(default_factory=dict)
    components: list[ComponentDoc] = Field(default_factory=list)
    includes: list[IncludeDoc] = Field(default_factory=list)
    constraints: dict[str, Scalar] = Field(default_factory=dict)
    connections: list[ConnectionDoc]
    exports: dict[str, tuple[str, str]] = Field(default_factory=dict)
    no_joint: list[tuple[str, str]] = Field(default_factory=list)
    hinges: list[HingeDoc] = Field(default_factory=list)


class LibraryDoc(BaseModel):
    """Library file: a templates section, other keys ignored."""

    model_config = ConfigDict(extra="ignore")

    templates: dict[str, TemplateDoc] = Field(default_factory=dict)


def _schema_error(e: ValidationError, prefix: str = "") -> SchemaError:
    first = e.errors()[0]
    path = prefix + "/" + "/".join(str(p) for p in first["loc"])
    return SchemaError(first["msg"], path)


def validate_design_document(data: Any, prefix: str = "") -> DesignDoc:
    """Check the version header, then validate against DesignDoc.

    Raises:
        SchemaError: With the document path of the first violation.
        VersionMismatchError: If the header names another format version.
    """
    if not isinstance(data, dict):
        raise SchemaError("design document must be a mapping", prefix or "/")
    if "flatpack" not in data:
        raise SchemaError("missing format header 'flatpack'", f"{prefix}/flatpack")
    if data["flatpack"] != FORMAT_VERSION:
        raise VersionMismatchError(data["flatpack"], FORMAT_VERSION)
    try:
        return DesignDoc.model_validate(data)
    except ValidationError as e:
        raise _schema_error(e, prefix) from None


def validate_library_document(data: Any, source: str) -> LibraryDoc:
    if not isinstance(data, dict):
        raise SchemaError(f"library file {source} must be a mapping", "/")
    try:
        return LibraryDoc.model_validate(data)
    except ValidationError as e:
        raise _schema_error(e) from None
