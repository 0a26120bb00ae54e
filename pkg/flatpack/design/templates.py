"""Parametric component templates.

A template is a recipe of three steps: named parameters with bounds, a vertex
generator producing the outline from bound parameters, and named interfaces
that refer to edges of the outer ring (edge k runs from vertex k to k+1).
Built-in templates are plain Python generators; custom templates declared in
design or library files carry vertex expressions instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from flatpack.design.expressions import evaluate, parse_expression, variables
from flatpack.exceptions import (
    BindingError,
    DegenerateGeometryError,
    DesignError,
    ParseError,
)
from flatpack.geometry import Polygon2

Bindings = Mapping[str, float]

# Bounds for built-in length parameters, mm
MIN_LENGTH = 0.1
MAX_LENGTH = 10000.0


@dataclass(frozen=True)
class ParameterSpec:
    """Template parameter with inclusive bounds."""

    name: str
    lower: float = MIN_LENGTH
    upper: float = MAX_LENGTH
    integer: bool = False

    def check(self, value: float, template: str) -> None:
        if not self.lower <= value <= self.upper:
            raise BindingError(
                f"{template}.{self.name}={value:g} is outside "
                f"[{self.lower:g}, {self.upper:g}]"
            )
        if self.integer and float(value) != int(value):
            raise BindingError(f"{template}.{self.name} must be an integer, got {value:g}")


@dataclass(frozen=True)
class ComponentTemplate:
    """Named parametric outline with edge interfaces.

    ``interfaces`` lists (name, edge index) pairs. Templates whose interface
    count depends on a parameter (the regular polygon) supply
    ``interface_generator`` instead.
    """

    name: str
    parameters: tuple[ParameterSpec, ...]
    vertex_generator: Callable[[Bindings], Polygon2] = field(compare=False)
    interfaces: tuple[tuple[str, int], ...] = ()
    interface_generator: Callable[[Bindings], tuple[tuple[str, int], ...]] | None = field(
        default=None, compare=False
    )
    # Source expressions of custom templates, kept for persistence
    vertex_expressions: tuple[tuple[str, str], ...] | None = None
    builtin: bool = True

    @property
    def parameter_names(self) -> list[str]:
        return [p.name for p in self.parameters]

    def check_bindings(self, bindings: Bindings) -> None:
        """Raises BindingError for missing, unknown or out-of-range parameters."""
        names = set(self.parameter_names)
        unknown = sorted(set(bindings) - names)
        if unknown:
            raise BindingError(f"Template '{self.name}' has no parameter(s) {', '.join(unknown)}")
        for spec in self.parameters:
            if spec.name not in bindings:
                raise BindingError(f"Template '{self.name}' parameter '{spec.name}' is unbound")
            spec.check(float(bindings[spec.name]), self.name)

    def resolve_interfaces(self, bindings: Bindings) -> dict[str, int]:
        pairs = self.interface_generator(bindings) if self.interface_generator else self.interfaces
        return dict(pairs)

    def generate(self, bindings: Bindings) -> Polygon2:
        """Outline for ``bindings``; the ring must be counter-clockwise."""
        self.check_bindings(bindings)
        try:
            poly = self.vertex_generator(bindings)
        except DegenerateGeometryError as e:
            raise BindingError(f"Template '{self.name}' produced a degenerate outline: {e}") from e
        n = len(poly.outer)
        for iface, edge in self.resolve_interfaces(bindings).items():
            if not 0 <= edge < n:
                raise DesignError(
                    f"Template '{self.name}' interface '{iface}' names edge {edge} "
                    f"of a {n}-vertex outline"
                )
        return poly


def _ccw_polygon(template: str, outer, holes=()) -> Polygon2:
    """Build a polygon, rejecting clockwise outer rings instead of reordering them."""
    pts = np.asarray(outer, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    signed = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    if signed <= 0:
        raise BindingError(f"Template '{template}' outline is not counter-clockwise")
    return Polygon2.from_rings(outer, holes)


# ---------------------------------------------------------------------------
# Built-in templates
# ---------------------------------------------------------------------------


def _rectangle(b: Bindings) -> Polygon2:
    l, w = b["l"], b["w"]
    return _ccw_polygon("rectangle", [(0, 0), (l, 0), (l, w), (0, w)])


def _trapezoid(b: Bindings) -> Polygon2:
    base, top, h = b["base"], b["top"], b["height"]
    inset = (base - top) / 2.0
    return _ccw_polygon("trapezoid", [(0, 0), (base, 0), (base - inset, h), (inset, h)])


def _right_triangle(b: Bindings) -> Polygon2:
    return _ccw_polygon("right_triangle", [(0, 0), (b["a"], 0), (0, b["b"])])


def _regular_polygon(b: Bindings) -> Polygon2:
    n, side = int(b["n"]), b["side"]
    pts = [(0.0, 0.0)]
    for k in range(n - 1):
        angle = 2.0 * math.pi * k / n
        x, y = pts[-1]
        pts.append((x + side * math.cos(angle), y + side * math.sin(angle)))
    return _ccw_polygon("regular_polygon", pts)


def _regular_polygon_interfaces(b: Bindings) -> tuple[tuple[str, int], ...]:
    return tuple((f"e{k}", k) for k in range(int(b["n"])))


def _annular_rectangle(b: Bindings) -> Polygon2:
    l, w, border = b["l"], b["w"], b["border"]
    if 2.0 * border >= min(l, w):
        raise BindingError(
            f"annular_rectangle border {border:g} leaves no cutout in {l:g} x {w:g}"
        )
    hole = [(border, border), (border, w - border), (l - border, w - border), (l - border, border)]
    return _ccw_polygon("annular_rectangle", [(0, 0), (l, 0), (l, w), (0, w)], [hole])


_EDGES_BRTL = (("b", 0), ("r", 1), ("t", 2), ("l", 3))

BUILTIN_TEMPLATES: dict[str, ComponentTemplate] = {
    "rectangle": ComponentTemplate(
        name="rectangle",
        parameters=(ParameterSpec("l"), ParameterSpec("w")),
        vertex_generator=_rectangle,
        interfaces=_EDGES_BRTL,
    ),
    "trapezoid": ComponentTemplate(
        name="trapezoid",
        parameters=(ParameterSpec("base"), ParameterSpec("top"), ParameterSpec("height")),
        vertex_generator=_trapezoid,
        interfaces=_EDGES_BRTL,
    ),
    "right_triangle": ComponentTemplate(
        name="right_triangle",
        parameters=(ParameterSpec("a"), ParameterSpec("b")),
        vertex_generator=_right_triangle,
        interfaces=(("b", 0), ("h", 1), ("l", 2)),
    ),
    "regular_polygon": ComponentTemplate(
        name="regular_polygon",
        parameters=(ParameterSpec("n", 3, 64, integer=True), ParameterSpec("side")),
        vertex_generator=_regular_polygon,
        interface_generator=_regular_polygon_interfaces,
    ),
    "annular_rectangle": ComponentTemplate(
        name="annular_rectangle",
        parameters=(ParameterSpec("l"), ParameterSpec("w"), ParameterSpec("border")),
        vertex_generator=_annular_rectangle,
        interfaces=_EDGES_BRTL,
    ),
}


# ---------------------------------------------------------------------------
# Custom templates
# ---------------------------------------------------------------------------


def custom_template(
    name: str,
    parameters: list[ParameterSpec],
    vertices: list[tuple[str, str]],
    interfaces: Mapping[str, int],
) -> ComponentTemplate:
    """Template whose outline is a list of (x, y) expressions over its parameters.

    Raises:
        ParseError: If a vertex expression is malformed or names an unknown parameter.
        DesignError: If an interface edge index is out of range.
    """
    names = {p.name for p in parameters}
    parsed = []
    for x_text, y_text in vertices:
        pair = []
        for text in (str(x_text), str(y_text)):
            expr = parse_expression(text)
            for var in variables(expr):
                if var.name not in names:
                    raise ParseError(f"Unknown parameter '{var.name}'", text, var.offset)
            pair.append(expr)
        parsed.append(tuple(pair))
    if len(parsed) < 3:
        raise DesignError(f"Template '{name}' needs at least 3 vertices")
    for iface, edge in interfaces.items():
        if not 0 <= edge < len(parsed):
            raise DesignError(
                f"Template '{name}' interface '{iface}' names edge {edge} "
                f"of a {len(parsed)}-vertex outline"
            )

    def generate(b: Bindings) -> Polygon2:
        pts = [(evaluate(x, b), evaluate(y, b)) for x, y in parsed]
        return _ccw_polygon(name, pts)

    return ComponentTemplate(
        name=name,
        parameters=tuple(parameters),
        vertex_generator=generate,
        interfaces=tuple(sorted(interfaces.items(), key=lambda kv: kv[1])),
        vertex_expressions=tuple((str(x), str(y)) for x, y in vertices),
        builtin=False,
    )
