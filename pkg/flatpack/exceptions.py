"""Custom exceptions for the flatpack compiler.

Every error raised by a compiler pass derives from FlatpackError and carries a
stable diagnostic code, an optional document path and the pipeline stage that
raised it (filled in by the pipeline when the error crosses a stage boundary).
"""

from __future__ import annotations


class FlatpackError(Exception):
    """Base exception for all compiler errors."""

    code = "E_FLATPACK"

    def __init__(self, message: str, *, path: str | None = None) -> None:
        self.path = path
        self.stage: str | None = None
        super().__init__(message)


# ---------------------------------------------------------------------------
# Geometry Exceptions
# ---------------------------------------------------------------------------


class GeometryError(FlatpackError):
    """Base exception for geometry kernel errors."""

    code = "E_GEOMETRY"


class DegenerateGeometryError(GeometryError):
    """Raised for collinear polygons, short rings or zero-length segments.

    Error Code: E_DEGENERATE
    """

    code = "E_DEGENERATE"


class DisjointUnionError(GeometryError):
    """Raised when a polygon union does not produce a single region.

    Error Code: E_DISJOINT_UNION
    """

    code = "E_DISJOINT_UNION"


class CollinearityError(GeometryError):
    """Raised when segment sets do not share a carrier line.

    Error Code: E_NOT_COLLINEAR
    """

    code = "E_NOT_COLLINEAR"


class MeshError(GeometryError):
    """Raised when a part cannot be extruded into a valid mesh.

    Error Code: E_MESH
    """

    code = "E_MESH"

    def __init__(self, detail: str, part_id: str | None = None) -> None:
        self.part_id = part_id
        message = f"Cannot mesh part '{part_id}': {detail}" if part_id else detail
        super().__init__(message)


# ---------------------------------------------------------------------------
# Design Exceptions
# ---------------------------------------------------------------------------


class DesignError(FlatpackError):
    """Base exception for design model errors."""

    code = "E_DESIGN"


class SchemaError(DesignError):
    """Raised when a design document violates the schema.

    Error Code: E_SCHEMA
    """

    code = "E_SCHEMA"

    def __init__(self, message: str, path: str = "/") -> None:
        super().__init__(f"{path}: {message}", path=path)


class VersionMismatchError(DesignError):
    """Raised when the document header names an unsupported format version.

    Error Code: E_VERSION
    """

    code = "E_VERSION"

    def __init__(self, found: object, supported: int) -> None:
        self.found = found
        self.supported = supported
        super().__init__(
            f"Unsupported design format version {found!r}; expected {supported}",
            path="/flatpack",
        )


class ParseError(DesignError):
    """Raised when an expression cannot be parsed.

    Error Code: E_PARSE
    """

    code = "E_PARSE"

    def __init__(self, message: str, text: str, offset: int) -> None:
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {text!r}")


class CycleError(DesignError):
    """Raised when constraint expressions depend on each other cyclically.

    Error Code: E_CYCLE
    """

    code = "E_CYCLE"

    def __init__(self, names: list[str]) -> None:
        self.names = names
        super().__init__(f"Cyclic constraints: {' -> '.join(names)}")


class EvalError(DesignError):
    """Raised when an expression cannot be evaluated (e.g. division by zero).

    Error Code: E_EVAL
    """

    code = "E_EVAL"


class BindingError(DesignError):
    """Raised when a template parameter is missing or out of bounds.

    Error Code: E_BINDING
    """

    code = "E_BINDING"


class ConstraintError(DesignError):
    """Raised when a resolved binding contradicts a constraint.

    Error Code: E_CONSTRAINT
    """

    code = "E_CONSTRAINT"


class DesignReferenceError(DesignError):
    """Raised when a connection, export or include names something unknown.

    Error Code: E_REFERENCE
    """

    code = "E_REFERENCE"


class SelfConnectionError(DesignError):
    """Raised when a connection joins a component to itself.

    Error Code: E_SELF_CONNECTION
    """

    code = "E_SELF_CONNECTION"


class ExportCollisionError(DesignError):
    """Raised for duplicate exported names or exports of consumed interfaces.

    Error Code: E_EXPORT
    """

    code = "E_EXPORT"


class TemplateNotFoundError(DesignError):
    """Raised when a template name is not in the library.

    Error Code: E_TEMPLATE
    """

    code = "E_TEMPLATE"

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Unknown component template '{name}'")


# ---------------------------------------------------------------------------
# Placement Exceptions
# ---------------------------------------------------------------------------


class PlacementError(FlatpackError):
    """Base exception for the placement pass."""

    code = "E_PLACEMENT"


class DegenerateInterfaceError(PlacementError):
    """Raised when an interface edge has zero length.

    Error Code: E_DEGENERATE_INTERFACE
    """

    code = "E_DEGENERATE_INTERFACE"


class DisconnectedDesignError(PlacementError):
    """Raised when the connectivity graph has more than one island.

    Error Code: E_DISCONNECTED
    """

    code = "E_DISCONNECTED"

    def __init__(self, islands: list[list[str]]) -> None:
        self.islands = islands
        listing = "; ".join("{" + ", ".join(island) + "}" for island in islands)
        super().__init__(f"Design is disconnected into {len(islands)} islands: {listing}")


class EmptyDesignError(PlacementError):
    """Raised when a design has no components to place or export.

    Error Code: E_EMPTY_DESIGN
    """

    code = "E_EMPTY_DESIGN"

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Design '{name}' has no components")


class OverConstrainedError(PlacementError):
    """Raised when a connection cycle implies two different placements.

    Error Code: E_OVERCONSTRAINED
    """

    code = "E_OVERCONSTRAINED"

    def __init__(self, connection: str, deviation: float) -> None:
        self.connection = connection
        self.deviation = deviation
        super().__init__(
            f"Connection {connection} disagrees with the placement implied by "
            f"the rest of the graph (deviation {deviation:.3g})"
        )


# ---------------------------------------------------------------------------
# Joint Exceptions
# ---------------------------------------------------------------------------


class JointError(FlatpackError):
    """Base exception for joint synthesis."""

    code = "E_JOINT"


class JointTooSmallError(JointError):
    """Raised when a segment or region cannot host any joint pattern.

    Error Code: E_JOINT_TOO_SMALL
    """

    code = "E_JOINT_TOO_SMALL"


class JointPlacementError(JointError):
    """Raised when a hole would breach the boundary of the face part.

    Error Code: E_JOINT_PLACEMENT
    """

    code = "E_JOINT_PLACEMENT"


class JointUnsupportedAngleError(JointError):
    """Raised for finger joints between parts that are not at right angles.

    Error Code: E_JOINT_ANGLE
    """

    code = "E_JOINT_ANGLE"

    def __init__(self, label: str, angle_deg: float) -> None:
        self.label = label
        self.angle_deg = angle_deg
        super().__init__(
            f"Joint {label} meets at {angle_deg:.2f} degrees; finger joints "
            "require a right angle"
        )


class JointConflictError(JointError):
    """Raised when two joints edit the same region of a part.

    Error Code: E_JOINT_CONFLICT
    """

    code = "E_JOINT_CONFLICT"

    def __init__(self, part_id: str, first: str, second: str) -> None:
        self.part_id = part_id
        self.first = first
        self.second = second
        super().__init__(f"Joints {first} and {second} overlap on part '{part_id}'")


# ---------------------------------------------------------------------------
# Fabrication Exceptions
# ---------------------------------------------------------------------------


class FabricationError(FlatpackError):
    """Base exception for layout and emission."""

    code = "E_FABRICATION"


class PartTooLargeError(FabricationError):
    """Raised when a part does not fit on a sheet in any allowed rotation.

    Error Code: E_PART_TOO_LARGE
    """

    code = "E_PART_TOO_LARGE"

    def __init__(
        self, part_id: str, size: tuple[float, float], sheet: tuple[float, float]
    ) -> None:
        self.part_id = part_id
        self.size = size
        self.sheet = sheet
        super().__init__(
            f"Part '{part_id}' ({size[0]:g} x {size[1]:g} mm) does not fit a "
            f"{sheet[0]:g} x {sheet[1]:g} mm sheet"
        )


class UnsupportedFormatError(FabricationError):
    """Raised when an output format has no registered emitter.

    Error Code: E_FORMAT
    """

    code = "E_FORMAT"

    def __init__(self, name: str, available: list[str]) -> None:
        self.name = name
        super().__init__(
            f"Unsupported output format '{name}' (available: {', '.join(available)})"
        )
