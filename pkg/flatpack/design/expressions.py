"""Arithmetic expression language for parameters and constraints.

Expressions combine numeric literals and parameter names (optionally dotted,
``top.l``) with + - * / and parentheses, using the usual precedence and left
associativity. parse_expression builds a small immutable AST; format_expression
prints it back in canonical form so that format(parse(s)) is a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Union

import lark

from flatpack.exceptions import EvalError, ParseError

grammar = r"""
?start: expr

?expr: expr "+" term -> add
     | expr "-" term -> sub
     | term

?term: term "*" factor -> mul
     | term "/" factor -> div
     | factor

?factor: "-" factor -> neg
       | "+" factor
       | atom

?atom: NUMBER -> num
     | NAME -> var
     | "(" expr ")"

NAME: /[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*/
NUMBER: /(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?/

%import common.WS
%ignore WS
"""


# ---- AST ----


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: Expr
    right: Expr


Expr = Union[Num, Var, Neg, BinOp]


def Add(left: Expr, right: Expr) -> BinOp:
    return BinOp("+", left, right)


def Sub(left: Expr, right: Expr) -> BinOp:
    return BinOp("-", left, right)


def Mul(left: Expr, right: Expr) -> BinOp:
    return BinOp("*", left, right)


def Div(left: Expr, right: Expr) -> BinOp:
    return BinOp("/", left, right)


class _ToAst(lark.Transformer):
    def num(self, items):
        return Num(float(items[0]))

    def var(self, items):
        token = items[0]
        return Var(str(token), token.start_pos or 0)

    def neg(self, items):
        return Neg(items[0])

    def add(self, items):
        return Add(*items)

    def sub(self, items):
        return Sub(*items)

    def mul(self, items):
        return Mul(*items)

    def div(self, items):
        return Div(*items)


@lru_cache(maxsize=1)
def _parser() -> lark.Lark:
    return lark.Lark(grammar, start="start", parser="lalr", propagate_positions=True)


@lru_cache(maxsize=4096)
def parse_expression(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises:
        ParseError: On unknown characters or malformed syntax, with the offset.
    """
    try:
        tree = _parser().parse(text)
    except lark.exceptions.UnexpectedCharacters as e:
        raise ParseError(f"Unexpected character {text[e.pos_in_stream]!r}", text, e.pos_in_stream) from None
    except lark.exceptions.UnexpectedToken as e:
        if e.token.type == "$END":
            raise ParseError("Unexpected end of expression", text, len(text)) from None
        raise ParseError(f"Unexpected token {str(e.token)!r}", text, e.token.start_pos or 0) from None
    except lark.exceptions.UnexpectedEOF:
        raise ParseError("Unexpected end of expression", text, len(text)) from None
    if isinstance(tree, lark.Token):
        # A bare literal or name collapses to a token under ?-rules
        return Num(float(tree)) if tree.type == "NUMBER" else Var(str(tree), 0)
    return _ToAst().transform(tree)


# ---- Printing ----

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def _format_number(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PRECEDENCE[e.op]
    if isinstance(e, Neg):
        return 3
    return 4


def format_expression(e: Expr) -> str:
    """Canonical text: single spaces around operators, minimal parentheses."""
    if isinstance(e, Num):
        return _format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = format_expression(e.operand)
        return f"-({inner})" if _prec(e.operand) < 3 else f"-{inner}"
    p = _PRECEDENCE[e.op]
    left = format_expression(e.left)
    right = format_expression(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# ---- Evaluation ----


def variables(e: Expr) -> list[Var]:
    """Variable references in left-to-right order."""
    if isinstance(e, Var):
        return [e]
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) + variables(e.right)
    return []


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate under ``bindings``.

    Raises:
        EvalError: On division by zero or an unbound name.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return float(bindings[e.name])
        except KeyError:
            raise EvalError(f"Unbound name '{e.name}'") from None
    if isinstance(e, Neg):
        return -evaluate(e.operand, bindings)
    left = evaluate(e.left, bindings)
    right = evaluate(e.right, bindings)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if right == 0:
        raise EvalError(f"Division by zero in '{format_expression(e)}'")
    return left / right


def evaluate_text(text: str, bindings: Mapping[str, float] | None = None) -> float:
    return evaluate(parse_expression(text), bindings or {})


def rename_variables(e: Expr, mapping: Mapping[str, str]) -> Expr:
    """Copy of ``e`` with variable names substituted through ``mapping``."""
    if isinstance(e, Var):
        return Var(mapping.get(e.name, e.name), e.offset)
    if isinstance(e, Neg):
        return Neg(rename_variables(e.operand, mapping))
    if isinstance(e, BinOp):
        return BinOp(e.op, rename_variables(e.left, mapping), rename_variables(e.right, mapping))
    return e
