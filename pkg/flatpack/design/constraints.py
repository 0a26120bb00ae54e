"""Directed evaluation of constraint expressions over meta-parameters."""

from __future__ import annotations

import graphlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from flatpack.design.expressions import (
    Expr,
    evaluate,
    format_expression,
    parse_expression,
    variables,
)
from flatpack.exceptions import ConstraintError, CycleError, ParseError

logger = logging.getLogger(__name__)

# Tolerance when a constraint target is also bound explicitly
CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class ConstraintExpr:
    """``target = text``; target is a design parameter or ``component.param``."""

    target: str
    text: str

    @cached_property
    def expr(self) -> Expr:
        return parse_expression(self.text)

    @property
    def canonical_text(self) -> str:
        return format_expression(self.expr)

    def depends_on(self) -> list[str]:
        return sorted({v.name for v in variables(self.expr)})


def _as_constraints(
    constraints: Iterable[ConstraintExpr] | Mapping[str, str],
) -> list[ConstraintExpr]:
    if isinstance(constraints, Mapping):
        return [ConstraintExpr(t, str(text)) for t, text in constraints.items()]
    return list(constraints)


def evaluation_order(constraints: Iterable[ConstraintExpr]) -> list[str]:
    """Topological order of constraint targets, ties broken by name.

    Raises:
        CycleError: If the targets depend on each other cyclically.
    """
    by_target = {c.target: c for c in constraints}
    sorter: graphlib.TopologicalSorter[str] = graphlib.TopologicalSorter()
    for target in sorted(by_target):
        deps = [d for d in by_target[target].depends_on() if d in by_target]
        sorter.add(target, *deps)
    try:
        return [name for name in sorter.static_order() if name in by_target]
    except graphlib.CycleError as e:
        cycle = list(e.args[1])
        raise CycleError(cycle) from None


def evaluate_constraints(
    constraints: Iterable[ConstraintExpr] | Mapping[str, str],
    bindings: Mapping[str, float],
) -> dict[str, float]:
    """Resolve every constrained parameter from the free ``bindings``.

    Args:
        constraints: Constraint expressions, or a target -> text mapping.
        bindings: Values of the free parameters.

    Returns:
        Free bindings plus every constraint target, evaluated in dependency order.

    Raises:
        CycleError: If the constraints depend on each other cyclically.
        ParseError: If an expression is malformed or names an unknown symbol.
        EvalError: On division by zero.
        ConstraintError: If a target is also bound to a different value.
    """
    items = _as_constraints(constraints)
    targets = {c.target for c in items}
    known = set(bindings) | targets
    for c in items:
        for var in variables(c.expr):
            if var.name not in known:
                raise ParseError(f"Unknown symbol '{var.name}'", c.text, var.offset)

    by_target = {c.target: c for c in items}
    resolved = {name: float(value) for name, value in bindings.items()}
    for target in evaluation_order(items):
        value = evaluate(by_target[target].expr, resolved)
        if target in bindings and abs(float(bindings[target]) - value) > CONSISTENCY_TOL:
            raise ConstraintError(
                f"'{target}' is bound to {bindings[target]} but its constraint "
                f"'{by_target[target].text}' gives {value}"
            )
        resolved[target] = value
    logger.debug("Evaluated %d constraints over %d free bindings", len(items), len(bindings))
    return resolved
