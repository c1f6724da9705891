"""The hyperflow program language: declarations, syntax, parsing and evaluation."""

from hyperflow.lang.evaluator import eval_dist_expr, eval_expr, eval_prob
from hyperflow.lang.parser import parse, parse_expression, parse_program, parse_space, parse_value
from hyperflow.lang.printer import pretty, render_value
from hyperflow.lang.space import Domain, Space, VarDecl, Visibility

__all__ = [
    "Domain",
    "Space",
    "VarDecl",
    "Visibility",
    "eval_dist_expr",
    "eval_expr",
    "eval_prob",
    "parse",
    "parse_expression",
    "parse_program",
    "parse_space",
    "parse_value",
    "pretty",
    "render_value",
]
