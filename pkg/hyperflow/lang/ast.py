"""Abstract syntax for expressions, distribution expressions and programs.

All nodes are frozen dataclasses, so programs hash and compare structurally;
the evaluator caches denotations keyed on them.
"""

from dataclasses import dataclass
from typing import Any, Tuple, Union

from hyperflow.lang.space import VarDecl


# Expressions


@dataclass(frozen=True)
class Const:
    value: Any


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class TupleExpr:
    items: Tuple["Expr", ...]


Expr = Union[Const, Var, BinOp, Not, Neg, TupleExpr]

ARITH_OPS = ("+", "-", "*", "/", "div", "mod")
COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or")


# Distribution expressions


@dataclass(frozen=True)
class Uniform:
    items: Tuple[Expr, ...]


@dataclass(frozen=True)
class UniformRange:
    lo: Expr
    hi: Expr


@dataclass(frozen=True)
class Enumerated:
    entries: Tuple[Tuple[Expr, Expr], ...]


@dataclass(frozen=True)
class PointOf:
    expr: Expr


DExpr = Union[Uniform, UniformRange, Enumerated, PointOf]


# Programs


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Abort:
    pass


@dataclass(frozen=True)
class Assert:
    prob: Expr


@dataclass(frozen=True)
class AssignVis:
    name: str
    expr: Expr


@dataclass(frozen=True)
class AssignHid:
    name: str
    expr: Expr


@dataclass(frozen=True)
class ChooseVis:
    name: str
    dexpr: DExpr


@dataclass(frozen=True)
class ChooseHid:
    name: str
    dexpr: DExpr


@dataclass(frozen=True)
class RevealExpr:
    expr: Expr


@dataclass(frozen=True)
class RevealDist:
    dexpr: DExpr


@dataclass(frozen=True)
class Seq:
    first: "Program"
    second: "Program"


@dataclass(frozen=True)
class PChoice:
    prob: Expr
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Program"
    orelse: "Program"


@dataclass(frozen=True)
class While:
    prob: Expr
    body: "Program"


@dataclass(frozen=True)
class Scope:
    decls: Tuple[VarDecl, ...]
    body: "Program"


Program = Union[
    Skip, Abort, Assert, AssignVis, AssignHid, ChooseVis, ChooseHid,
    RevealExpr, RevealDist, Seq, PChoice, If, While, Scope,
]


def seq(*programs: Program) -> Program:
    """Right-nested sequence, the shape the parser produces."""
    if not programs:
        return Skip()
    result = programs[-1]
    for program in reversed(programs[:-1]):
        result = Seq(program, result)
    return result


def free_vars(expr: Expr) -> frozenset:
    """Variable names an expression reads."""
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, BinOp):
        return free_vars(expr.left) | free_vars(expr.right)
    if isinstance(expr, (Not, Neg)):
        return free_vars(expr.operand)
    if isinstance(expr, TupleExpr):
        return frozenset().union(*(free_vars(item) for item in expr.items))
    return frozenset()
