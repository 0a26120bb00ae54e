"""Component instances: a template bound to concrete parameter values."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from flatpack.design.constraints import ConstraintExpr, evaluate_constraints
from flatpack.design.templates import ComponentTemplate
from flatpack.exceptions import DegenerateInterfaceError, DesignReferenceError
from flatpack.geometry import EPS_LEN, Polygon2, Segment2, Transform

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComponentInstance:
    """A placed or unplaced planar part.

    Instances are immutable; the merge and joint passes derive new ones with
    dataclasses.replace. Joint feature segments are in the local frame.
    """

    id: str
    template: ComponentTemplate
    bindings: Mapping[str, float]
    polygon: Polygon2
    interfaces: Mapping[str, int]
    fingers: tuple[Segment2, ...] = ()
    holes: tuple[Segment2, ...] = ()
    slots: tuple[Segment2, ...] = ()
    placement: Transform | None = field(default=None, compare=False)
    # Ids of parts merged into this one, in merge order
    absorbed: tuple[str, ...] = ()

    def interface_edge(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints of the interface edge in local coordinates.

        Raises:
            DesignReferenceError: If the interface does not exist.
            DegenerateInterfaceError: If the edge has zero length.
        """
        if name not in self.interfaces:
            raise DesignReferenceError(
                f"Component '{self.id}' has no interface '{name}'"
                f" (available: {', '.join(sorted(self.interfaces))})"
            )
        a, b = self.polygon.edge(self.interfaces[name])
        if float(np.linalg.norm(b - a)) <= EPS_LEN:
            raise DegenerateInterfaceError(f"Interface {self.id}.{name} has zero length")
        return a, b

    def with_placement(self, placement: Transform) -> ComponentInstance:
        return replace(self, placement=placement)


def instantiate_component(
    template: ComponentTemplate,
    bindings: Mapping[str, float],
    *,
    id: str = "component",
    constraints: Iterable[ConstraintExpr] = (),
) -> ComponentInstance:
    """Bind ``template`` and generate its outline.

    ``constraints`` may target the template's own parameter names; they are
    evaluated before the bounds check.

    Raises:
        BindingError: If a parameter is missing or out of bounds.
        ConstraintError: If an explicit binding contradicts a constraint.
    """
    resolved = evaluate_constraints(list(constraints), bindings) if constraints else dict(bindings)
    resolved = {
        k: float(v)
        for k, v in resolved.items()
        if k in template.parameter_names or k in bindings
    }
    polygon = template.generate(resolved)
    interfaces = template.resolve_interfaces(resolved)
    logger.debug("Instantiated %s from %s (%d vertices)", id, template.name, len(polygon.outer))
    return ComponentInstance(
        id=id,
        template=template,
        bindings=dict(resolved),
        polygon=polygon,
        interfaces=interfaces,
    )
