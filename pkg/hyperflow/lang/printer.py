"""Canonical pretty-printer; its output parses back to the same AST."""

from fractions import Fraction
from typing import Any, List, Optional

from hyperflow.lang.ast import (
    Abort, Assert, AssignHid, AssignVis, BinOp, ChooseHid, ChooseVis, Const, DExpr, Enumerated, Expr, If,
    Neg, Not, PChoice, PointOf, Program, RevealDist, RevealExpr, Scope, Seq, Skip, TupleExpr, Uniform,
    UniformRange, Var, While,
)
from hyperflow.lang.space import Space

_OR, _AND, _NOT, _CMP, _SUM, _PRODUCT, _UNARY, _ATOM = range(1, 9)

_LEVEL = {
    "or": _OR, "and": _AND,
    "=": _CMP, "!=": _CMP, "<": _CMP, "<=": _CMP, ">": _CMP, ">=": _CMP,
    "+": _SUM, "-": _SUM,
    "*": _PRODUCT, "/": _PRODUCT, "div": _PRODUCT, "mod": _PRODUCT,
}


def render_value(value: Any) -> str:
    """A value as a language literal."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else str(value.numerator)
    if isinstance(value, tuple):
        return "(" + ", ".join(render_value(item) for item in value) + ")"
    return str(value)


def pretty_expr(expr: Expr, level: int = 0) -> str:
    text, own = _expr(expr)
    return f"({text})" if own < level else text


def _expr(expr: Expr):
    if isinstance(expr, Const):
        own = _UNARY if isinstance(expr.value, Fraction) and expr.value.denominator != 1 else _ATOM
        return render_value(expr.value), own
    if isinstance(expr, Var):
        return expr.name, _ATOM
    if isinstance(expr, TupleExpr):
        return "(" + ", ".join(pretty_expr(item) for item in expr.items) + ")", _ATOM
    if isinstance(expr, Not):
        return "not " + pretty_expr(expr.operand, _NOT), _NOT
    if isinstance(expr, Neg):
        operand = expr.operand
        # "-3" would read back as a negative literal
        if isinstance(operand, Const) and not isinstance(operand.value, bool):
            return f"-({render_value(operand.value)})", _UNARY
        return "-" + pretty_expr(operand, _UNARY), _UNARY
    if isinstance(expr, BinOp):
        own = _LEVEL[expr.op]
        left_level = own + 1 if own == _CMP else own
        return f"{pretty_expr(expr.left, left_level)} {expr.op} {pretty_expr(expr.right, own + 1)}", own
    raise TypeError(f"not an expression: {expr!r}")


def pretty_dexpr(dexpr: DExpr) -> str:
    if isinstance(dexpr, Uniform):
        return "uniform{" + ", ".join(pretty_expr(item) for item in dexpr.items) + "}"
    if isinstance(dexpr, UniformRange):
        return f"uniform{{{pretty_expr(dexpr.lo)} .. {pretty_expr(dexpr.hi)}}}"
    if isinstance(dexpr, PointOf):
        return f"point({pretty_expr(dexpr.expr)})"
    if isinstance(dexpr, Enumerated):
        body = ", ".join(f"{pretty_expr(value)} @ {pretty_expr(weight)}" for value, weight in dexpr.entries)
        return "{{ " + body + " }}"
    raise TypeError(f"not a distribution expression: {dexpr!r}")


def _atom(program: Program) -> str:
    text = pretty_stmt(program)
    return f"({text})" if isinstance(program, (Seq, PChoice)) else text


def pretty_stmt(program: Program) -> str:
    """One statement on one line."""
    if isinstance(program, Skip):
        return "skip"
    if isinstance(program, Abort):
        return "abort"
    if isinstance(program, Assert):
        return "{" + pretty_expr(program.prob) + "}"
    if isinstance(program, (AssignVis, AssignHid)):
        return f"{program.name} := {pretty_expr(program.expr)}"
    if isinstance(program, (ChooseVis, ChooseHid)):
        return f"{program.name} :in {pretty_dexpr(program.dexpr)}"
    if isinstance(program, RevealExpr):
        return f"reveal {pretty_expr(program.expr)}"
    if isinstance(program, RevealDist):
        return f"reveal {pretty_dexpr(program.dexpr)}"
    if isinstance(program, Seq):
        first = pretty_stmt(program.first)
        if isinstance(program.first, Seq):
            first = f"({first})"
        return f"{first}; {pretty_stmt(program.second)}"
    if isinstance(program, PChoice):
        return f"{_atom(program.left)} [{pretty_expr(program.prob)}] {_atom(program.right)}"
    if isinstance(program, If):
        return (
            f"if {pretty_expr(program.cond)} then {pretty_stmt(program.then)} "
            f"else {pretty_stmt(program.orelse)} fi"
        )
    if isinstance(program, While):
        return f"while {pretty_expr(program.prob)} do {pretty_stmt(program.body)} od"
    if isinstance(program, Scope):
        decls = " ".join(d.render() for d in program.decls)
        inner = f"{decls} {pretty_stmt(program.body)}" if decls else pretty_stmt(program.body)
        return f"[[ {inner} ]]"
    raise TypeError(f"not a program: {program!r}")


def pretty(program: Program, space: Optional[Space] = None) -> str:
    """Program text, preceded by its declarations when a space is given."""
    lines: List[str] = []
    if space is not None and space.decls:
        lines.append(space.render())
    lines.append(pretty_stmt(program))
    return "\n".join(lines)
