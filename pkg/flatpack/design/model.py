"""Hierarchical design model: components, connections, constraints and exports.

A DesignModel is the declarative form of one hierarchy level. Components are
declared by template name and bindings (numbers or expression strings);
nested models enter through includes under a local alias and expose
interfaces through their exports. flatten() lowers the tree to concrete
ComponentInstances with path-joined ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

from flatpack.design.component import ComponentInstance
from flatpack.design.constraints import ConstraintExpr
from flatpack.design.templates import ComponentTemplate
from flatpack.exceptions import (
    DesignError,
    DesignReferenceError,
    ExportCollisionError,
    SelfConnectionError,
)

Endpoint = tuple[str, str]  # (component id or include alias, interface name)
BindingValue = Union[float, str]  # literal mm or expression text

ID_SEPARATOR = "/"


def part_sort_key(part_id: str) -> tuple[str, str]:
    """Order parts by their own id first and their include path second.

    A sub-model's parts then sort the same whether it is included or written
    out flat, and every pass that picks a first part picks the same one.
    """
    return part_id.rsplit(ID_SEPARATOR, 1)[-1], part_id


class Alignment(str, Enum):
    """Relative orientation of the two front faces after alignment."""

    FRONT_FRONT = "ff"
    FRONT_BACK = "fb"


@dataclass(frozen=True)
class Connection:
    """Directed edge A -> B: the connecting part A is positioned relative to B."""

    connecting: Endpoint
    connected: Endpoint
    alignment: Alignment = Alignment.FRONT_FRONT
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def label(self) -> str:
        a, b = self.connecting, self.connected
        return f"{a[0]}.{a[1]} -> {b[0]}.{b[1]}"

    @property
    def parts(self) -> tuple[str, str]:
        return self.connecting[0], self.connected[0]


@dataclass(frozen=True)
class ParameterDecl:
    """Design-level meta-parameter with a default value and bounds."""

    name: str
    value: float
    lower: float | None = None
    upper: float | None = None


@dataclass(frozen=True)
class ComponentDecl:
    id: str
    template: str
    bindings: Mapping[str, BindingValue] = field(default_factory=dict)


@dataclass(frozen=True)
class HingeDecl:
    """Flexible hinge region on a component, in its local frame."""

    component: str
    region: tuple[float, float, float, float]
    rows: int = 1
    cols: int = 1


@dataclass(frozen=True)
class Include:
    """Nested model under a local alias, with optional parameter overrides."""

    alias: str
    model: DesignModel
    bindings: Mapping[str, BindingValue] = field(default_factory=dict)
    source: str | None = None  # file reference as written, None for inline


@dataclass(frozen=True)
class DesignModel:
    name: str = "design"
    templates: Mapping[str, ComponentTemplate] = field(default_factory=dict)
    parameters: tuple[ParameterDecl, ...] = ()
    components: tuple[ComponentDecl, ...] = ()
    includes: tuple[Include, ...] = ()
    constraints: tuple[ConstraintExpr, ...] = ()
    connections: tuple[Connection, ...] = ()
    exports: Mapping[str, Endpoint] = field(default_factory=dict)
    no_joint: tuple[tuple[str, str], ...] = ()
    hinges: tuple[HingeDecl, ...] = ()

    @property
    def node_ids(self) -> list[str]:
        """Ids of the nodes of this level: components and include aliases."""
        return [c.id for c in self.components] + [i.alias for i in self.includes]

    def component(self, id: str) -> ComponentDecl | None:
        return next((c for c in self.components if c.id == id), None)

    def include(self, alias: str) -> Include | None:
        return next((i for i in self.includes if i.alias == alias), None)


def make_connection(
    connecting: Endpoint,
    connected: Endpoint,
    alignment: Alignment | str = Alignment.FRONT_FRONT,
    offset: Sequence[float] = (0.0, 0.0, 0.0),
    rotation: Sequence[float] = (0.0, 0.0, 0.0),
    *,
    components: Mapping[str, ComponentInstance] | None = None,
) -> Connection:
    """Validated connection 5-tuple.

    With ``components`` given, both endpoints are checked against them.

    Raises:
        SelfConnectionError: If both endpoints name the same component.
        DesignReferenceError: If an id or interface does not exist.
    """
    if connecting[0] == connected[0]:
        raise SelfConnectionError(
            f"Connection {connecting[0]}.{connecting[1]} -> {connected[0]}.{connected[1]} "
            "joins a component to itself"
        )
    if len(offset) != 3 or len(rotation) != 3:
        raise DesignError("Connection offset and rotation need three components each")
    if components is not None:
        for cid, iface in (connecting, connected):
            if cid not in components:
                raise DesignReferenceError(f"Connection names unknown component '{cid}'")
            if iface not in components[cid].interfaces:
                raise DesignReferenceError(f"Component '{cid}' has no interface '{iface}'")
    return Connection(
        connecting=(str(connecting[0]), str(connecting[1])),
        connected=(str(connected[0]), str(connected[1])),
        alignment=Alignment(alignment),
        offset=tuple(float(v) for v in offset),
        rotation=tuple(float(v) for v in rotation),
    )


def compose(
    parts: Iterable[DesignModel | ComponentInstance],
    connections: Iterable[Connection] = (),
    constraints: Iterable[ConstraintExpr] = (),
    exported_interfaces: Iterable[tuple[str, Endpoint]] | Mapping[str, Endpoint] = (),
    *,
    name: str = "design",
) -> DesignModel:
    """Build a new hierarchy level from components and sub-models.

    Sub-models are included under their own name; connections refer to their
    exported interfaces as (model name, exported name).

    Raises:
        ExportCollisionError: If two exported names or two node ids collide.
        DesignReferenceError: If a connection or export names an unknown node.
    """
    components: list[ComponentDecl] = []
    includes: list[Include] = []
    templates: dict[str, ComponentTemplate] = {}
    for part in parts:
        if isinstance(part, DesignModel):
            includes.append(Include(alias=part.name, model=part))
        else:
            components.append(ComponentDecl(part.id, part.template.name, dict(part.bindings)))
            if not part.template.builtin:
                templates[part.template.name] = part.template

    node_ids = [c.id for c in components] + [i.alias for i in includes]
    dupes = sorted({n for n in node_ids if node_ids.count(n) > 1})
    if dupes:
        raise ExportCollisionError(f"Duplicate node ids in composition: {', '.join(dupes)}")

    pairs = (
        list(exported_interfaces.items())
        if isinstance(exported_interfaces, Mapping)
        else list(exported_interfaces)
    )
    exports: dict[str, Endpoint] = {}
    for export_name, endpoint in pairs:
        if export_name in exports:
            raise ExportCollisionError(f"Exported interface '{export_name}' is declared twice")
        exports[export_name] = (str(endpoint[0]), str(endpoint[1]))

    known = set(node_ids)
    conns = tuple(connections)
    for conn in conns:
        for cid, _ in (conn.connecting, conn.connected):
            if cid not in known:
                raise DesignReferenceError(f"Connection {conn.label} names unknown node '{cid}'")
    for export_name, (cid, _) in exports.items():
        if cid not in known:
            raise DesignReferenceError(f"Export '{export_name}' names unknown node '{cid}'")

    return DesignModel(
        name=name,
        templates=templates,
        components=tuple(components),
        includes=tuple(includes),
        constraints=tuple(constraints),
        connections=conns,
        exports=exports,
    )
