"""Lowering a hierarchical DesignModel to one flat set of component instances."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping

from flatpack.design.component import ComponentInstance, instantiate_component
from flatpack.design.constraints import ConstraintExpr, evaluate_constraints
from flatpack.design.expressions import (
    Num,
    evaluate,
    format_expression,
    parse_expression,
    rename_variables,
    variables,
)
from flatpack.design.library import TemplateLibrary, get_library
from flatpack.design.model import (
    ID_SEPARATOR,
    Connection,
    DesignModel,
    Endpoint,
    HingeDecl,
    part_sort_key,
)
from flatpack.design.templates import ComponentTemplate
from flatpack.exceptions import (
    BindingError,
    DesignError,
    DesignReferenceError,
    ExportCollisionError,
    SelfConnectionError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlatDesign:
    """Every leaf component of a design under its path-joined id."""

    name: str
    components: Mapping[str, ComponentInstance]
    connections: tuple[Connection, ...]
    no_joint: frozenset[frozenset[str]] = frozenset()
    hinges: tuple[HingeDecl, ...] = ()
    # Resolved parameter values: "path/param" and "path/component.param"
    bindings: Mapping[str, float] = field(default_factory=dict)
    free_parameters: tuple[str, ...] = ()
    total_parameters: int = 0

    @property
    def ids(self) -> list[str]:
        return sorted(self.components, key=part_sort_key)

    def islands(self) -> list[list[str]]:
        """Connected components of the connectivity graph, each sorted, by first id."""
        adjacency: dict[str, set[str]] = {cid: set() for cid in self.components}
        for conn in self.connections:
            a, b = conn.parts
            adjacency[a].add(b)
            adjacency[b].add(a)
        seen: set[str] = set()
        islands = []
        for start in self.ids:
            if start in seen:
                continue
            stack, island = [start], []
            seen.add(start)
            while stack:
                node = stack.pop()
                island.append(node)
                for nxt in adjacency[node] - seen:
                    seen.add(nxt)
                    stack.append(nxt)
            islands.append(sorted(island, key=part_sort_key))
        return islands


@dataclass
class _Accumulator:
    components: dict[str, ComponentInstance] = field(default_factory=dict)
    connections: list[Connection] = field(default_factory=list)
    consumed: set[Endpoint] = field(default_factory=set)
    no_joint: set[frozenset[str]] = field(default_factory=set)
    hinges: list[HingeDecl] = field(default_factory=list)
    bindings: dict[str, float] = field(default_factory=dict)
    free: list[str] = field(default_factory=list)
    total: int = 0


def flatten(model: DesignModel, library: TemplateLibrary | None = None) -> FlatDesign:
    """Instantiate every component of the hierarchy with globally unique ids.

    Raises:
        DesignError: Any binding, constraint, reference or export error.
    """
    acc = _Accumulator()
    _flatten_level(model, "", {}, library or get_library(), acc, {})
    order = sorted(acc.components, key=part_sort_key)
    flat = FlatDesign(
        name=model.name,
        components={cid: acc.components[cid] for cid in order},
        connections=tuple(acc.connections),
        no_joint=frozenset(acc.no_joint),
        hinges=tuple(acc.hinges),
        bindings=dict(sorted(acc.bindings.items())),
        free_parameters=tuple(acc.free),
        total_parameters=acc.total,
    )
    logger.info(
        "Flattened %s: %d components, %d connections, %d/%d free parameters",
        model.name,
        len(flat.components),
        len(flat.connections),
        len(flat.free_parameters),
        flat.total_parameters,
    )
    return flat


def _flatten_level(
    model: DesignModel,
    prefix: str,
    overrides: Mapping[str, float],
    library: TemplateLibrary,
    acc: _Accumulator,
    inherited: Mapping[str, ComponentTemplate],
) -> dict[str, Endpoint]:
    """Flatten one level into ``acc`` and return its exports as flat endpoints."""
    templates = {**inherited, **model.templates}
    node_ids = model.node_ids
    dupes = sorted({n for n in node_ids if node_ids.count(n) > 1})
    if dupes:
        raise DesignError(f"Duplicate ids in '{model.name}': {', '.join(dupes)}")

    params = {p.name: p for p in model.parameters}
    for name in overrides:
        if name not in params:
            raise DesignReferenceError(
                f"Include binding '{name}' names no parameter of '{model.name}'"
            )

    # ---- Gather free bindings and constraints ----
    resolved_templates = {c.id: library.get(c.template, templates) for c in model.components}
    free: dict[str, float] = {}
    constraints: list[ConstraintExpr] = []
    for decl in model.components:
        template = resolved_templates[decl.id]
        for pname, value in decl.bindings.items():
            if pname not in template.parameter_names:
                raise BindingError(
                    f"Template '{template.name}' of '{prefix}{decl.id}' has no parameter '{pname}'"
                )
            target = f"{decl.id}.{pname}"
            expr = parse_expression(value) if isinstance(value, str) else Num(float(value))
            if isinstance(expr, Num):
                free[target] = expr.value
                continue
            # Bare names of the component's own bound parameters refer to that component
            own = {
                v.name: f"{decl.id}.{v.name}"
                for v in variables(expr)
                if v.name in decl.bindings and v.name not in params
            }
            constraints.append(
                ConstraintExpr(target, format_expression(rename_variables(expr, own)))
            )
    for c in model.constraints:
        _check_constraint_target(c.target, params, model, resolved_templates)
        constraints.append(c)

    targets = {c.target for c in constraints}
    for name, decl in params.items():
        if name in targets:
            continue
        free[name] = float(overrides.get(name, decl.value))

    resolved = evaluate_constraints(constraints, free)

    for name, decl in params.items():
        value = resolved[name]
        if (decl.lower is not None and value < decl.lower) or (
            decl.upper is not None and value > decl.upper
        ):
            raise BindingError(
                f"Parameter '{prefix}{name}'={value:g} is outside "
                f"[{decl.lower}, {decl.upper}]"
            )

    # ---- Instantiate components ----
    for decl in model.components:
        template = resolved_templates[decl.id]
        bindings = {
            p: resolved[f"{decl.id}.{p}"]
            for p in template.parameter_names
            if f"{decl.id}.{p}" in resolved
        }
        flat_id = prefix + decl.id
        try:
            acc.components[flat_id] = instantiate_component(template, bindings, id=flat_id)
        except BindingError as e:
            raise BindingError(f"Component '{flat_id}': {e}") from None
        acc.total += len(template.parameters)
        acc.free.extend(
            f"{prefix}{decl.id}.{p}"
            for p in template.parameter_names
            if f"{decl.id}.{p}" in free and f"{decl.id}.{p}" not in targets
        )
    acc.free.extend(
        prefix + name for name in params if name not in targets and name not in overrides
    )
    acc.bindings.update({prefix + k: v for k, v in resolved.items()})

    # ---- Nested models ----
    sub_exports: dict[str, dict[str, Endpoint]] = {}
    for inc in model.includes:
        sub_overrides = {
            name: evaluate(parse_expression(value), resolved)
            if isinstance(value, str)
            else float(value)
            for name, value in inc.bindings.items()
        }
        sub_exports[inc.alias] = _flatten_level(
            inc.model, f"{prefix}{inc.alias}{ID_SEPARATOR}", sub_overrides, library, acc, templates
        )

    def resolve(endpoint: Endpoint, what: str) -> Endpoint:
        node, iface = endpoint
        if model.component(node) is not None:
            flat_id = prefix + node
            if iface not in acc.components[flat_id].interfaces:
                raise DesignReferenceError(f"{what}: component '{flat_id}' has no interface '{iface}'")
            return flat_id, iface
        if node in sub_exports:
            if iface not in sub_exports[node]:
                raise DesignReferenceError(f"{what}: '{prefix}{node}' exports no interface '{iface}'")
            return sub_exports[node][iface]
        raise DesignReferenceError(f"{what}: unknown component '{prefix}{node}'")

    # ---- Connections ----
    for conn in model.connections:
        a = resolve(conn.connecting, f"Connection {conn.label}")
        b = resolve(conn.connected, f"Connection {conn.label}")
        if a[0] == b[0]:
            raise SelfConnectionError(f"Connection {conn.label} joins '{a[0]}' to itself")
        acc.connections.append(replace(conn, connecting=a, connected=b))
        acc.consumed.update((a, b))

    for first, second in model.no_joint:
        pair = frozenset(_resolve_path(p, prefix, acc) for p in (first, second))
        acc.no_joint.add(pair)
    for hinge in model.hinges:
        acc.hinges.append(replace(hinge, component=_resolve_path(hinge.component, prefix, acc)))

    # ---- Exports ----
    exports: dict[str, Endpoint] = {}
    for export_name, endpoint in model.exports.items():
        flat = resolve(endpoint, f"Export '{export_name}'")
        if flat in acc.consumed:
            raise ExportCollisionError(
                f"Export '{export_name}' re-exposes {flat[0]}.{flat[1]}, which an "
                "internal connection already uses"
            )
        exports[export_name] = flat
    return exports


def _check_constraint_target(
    target: str,
    params: Mapping[str, object],
    model: DesignModel,
    templates: Mapping[str, ComponentTemplate],
) -> None:
    if target in params:
        return
    cid, _, pname = target.partition(".")
    if cid in templates and pname in templates[cid].parameter_names:
        return
    raise DesignReferenceError(f"Constraint target '{target}' is not a parameter of '{model.name}'")


def _resolve_path(path: str, prefix: str, acc: _Accumulator) -> str:
    flat_id = prefix + path
    if flat_id not in acc.components:
        raise DesignReferenceError(f"Unknown component '{flat_id}'")
    return flat_id
