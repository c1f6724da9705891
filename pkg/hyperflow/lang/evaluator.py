"""Expression, probability and distribution-expression evaluation at a state."""

from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Tuple

from hyperflow.core.errors import DistributionError, EvaluationError
from hyperflow.lang.ast import (
    BinOp, Const, DExpr, Enumerated, Expr, Neg, Not, PointOf, TupleExpr, Uniform, UniformRange, Var,
)
from hyperflow.lang.space import Space
from hyperflow.models.dist import Dist, point, uniform, value_order_key

Env = Mapping[str, Any]


def _normalize(x: Any) -> Any:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _number(x: Any, op: str) -> Any:
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, (int, Fraction)):
        return x
    raise EvaluationError(f"operator '{op}' expects numbers, got {x!r}")


def _integer(x: Any, op: str) -> int:
    n = _number(x, op)
    if isinstance(n, Fraction):
        raise EvaluationError(f"operator '{op}' expects integers, got {n}")
    return n


def _truth(x: Any, op: str) -> bool:
    if isinstance(x, bool):
        return x
    if not isinstance(x, str) and x in (0, 1):
        return bool(x)
    raise EvaluationError(f"operator '{op}' expects Booleans, got {x!r}")


def evaluate(expr: Expr, env: Env) -> Any:
    """Evaluate ``expr`` under a name-to-value binding."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise EvaluationError(f"unbound variable '{expr.name}'")
    if isinstance(expr, TupleExpr):
        return tuple(evaluate(item, env) for item in expr.items)
    if isinstance(expr, Not):
        return not _truth(evaluate(expr.operand, env), "not")
    if isinstance(expr, Neg):
        return _normalize(-_number(evaluate(expr.operand, env), "-"))
    if isinstance(expr, BinOp):
        return _binop(expr, env)
    raise EvaluationError(f"not an expression: {expr!r}")


def _binop(expr: BinOp, env: Env) -> Any:
    op = expr.op
    # Short-circuit connectives
    if op == "and":
        return _truth(evaluate(expr.left, env), op) and _truth(evaluate(expr.right, env), op)
    if op == "or":
        return _truth(evaluate(expr.left, env), op) or _truth(evaluate(expr.right, env), op)

    left = evaluate(expr.left, env)
    right = evaluate(expr.right, env)
    if op == "=":
        return value_order_key(left) == value_order_key(right)
    if op == "!=":
        return value_order_key(left) != value_order_key(right)
    if op in ("<", "<=", ">", ">="):
        a, b = _number(left, op), _number(right, op)
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
    if op == "+":
        return _normalize(_number(left, op) + _number(right, op))
    if op == "-":
        return _normalize(_number(left, op) - _number(right, op))
    if op == "*":
        return _normalize(_number(left, op) * _number(right, op))
    if op == "/":
        a, b = _number(left, op), _number(right, op)
        if b == 0:
            raise EvaluationError("division by zero")
        return _normalize(Fraction(a) / b)
    if op in ("div", "mod"):
        a, b = _integer(left, op), _integer(right, op)
        if b == 0:
            raise EvaluationError(f"{op} by zero")
        return a // b if op == "div" else a % b
    raise EvaluationError(f"unknown operator '{op}'")


def probability(expr: Expr, env: Env) -> Fraction:
    """Evaluate to a probability; Booleans read as 0/1."""
    value = evaluate(expr, env)
    if isinstance(value, bool):
        return Fraction(int(value))
    if not isinstance(value, (int, Fraction)):
        raise EvaluationError(f"probability expression gave {value!r}")
    if value < 0 or value > 1:
        raise EvaluationError(f"probability {value} outside [0, 1]")
    return Fraction(value)


def distribution(dexpr: DExpr, env: Env) -> Dist:
    """Evaluate a distribution expression; enumerated weights must sum to at most one."""
    if isinstance(dexpr, PointOf):
        return point(evaluate(dexpr.expr, env))
    if isinstance(dexpr, Uniform):
        return uniform(evaluate(item, env) for item in dexpr.items)
    if isinstance(dexpr, UniformRange):
        lo = _integer(evaluate(dexpr.lo, env), "..")
        hi = _integer(evaluate(dexpr.hi, env), "..")
        if lo > hi:
            raise EvaluationError(f"empty uniform range {lo}..{hi}")
        return uniform(range(lo, hi + 1))
    if isinstance(dexpr, Enumerated):
        pairs = []
        total = Fraction(0)
        for value_expr, weight_expr in dexpr.entries:
            weight = evaluate(weight_expr, env)
            weight = Fraction(int(weight)) if isinstance(weight, bool) else weight
            if not isinstance(weight, (int, Fraction)):
                raise EvaluationError(f"enumerated weight {weight!r} is not a number")
            if weight < 0:
                raise EvaluationError(f"negative enumerated weight {weight}")
            total += weight
            pairs.append((evaluate(value_expr, env), weight))
        if total > 1:
            raise EvaluationError(f"enumerated weights sum to {total} > 1")
        return Dist(pairs)
    raise EvaluationError(f"not a distribution expression: {dexpr!r}")


def _at_state(fn, node, space: Space, v: Tuple[Any, ...], h: Tuple[Any, ...]):
    try:
        return fn(node, space.env(v, h))
    except EvaluationError as e:
        if e.visible is None and e.hidden is None:
            raise EvaluationError(e.message, visible=v, hidden=h) from None
        raise
    except DistributionError as e:
        raise EvaluationError(str(e), visible=v, hidden=h) from e


def eval_expr(expr: Expr, space: Space, v: Tuple[Any, ...], h: Tuple[Any, ...]) -> Any:
    """Value of ``expr`` at the state (v, h)."""
    return _at_state(evaluate, expr, space, v, h)


def eval_prob(expr: Expr, space: Space, v: Tuple[Any, ...], h: Tuple[Any, ...]) -> Fraction:
    return _at_state(probability, expr, space, v, h)


def eval_dist_expr(dexpr: DExpr, space: Space, v: Tuple[Any, ...], h: Tuple[Any, ...]) -> Dist:
    """Distribution denoted by ``dexpr`` at the state (v, h)."""
    return _at_state(distribution, dexpr, space, v, h)


def constant_value(expr: Expr) -> Optional[Any]:
    """Value of a variable-free expression, or None when it reads state or fails."""
    try:
        return evaluate(expr, {})
    except EvaluationError:
        return None
