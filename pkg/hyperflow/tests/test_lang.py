"""Tests for declarations, parsing, printing and expression evaluation."""

from fractions import Fraction

import pytest

from hyperflow.core.errors import EvaluationError, ParseError
from hyperflow.lang.ast import (
    AssignHid, AssignVis, BinOp, ChooseVis, Const, If, PChoice, RevealDist, RevealExpr, Scope, Seq, Skip,
    TupleExpr, Var, While, free_vars, seq,
)
from hyperflow.lang.evaluator import eval_dist_expr, eval_expr, eval_prob
from hyperflow.lang.parser import parse, parse_expression, parse_program, parse_space, parse_value
from hyperflow.lang.printer import pretty, render_value
from hyperflow.lang.space import Domain, Visibility
from hyperflow.models.dist import Dist, uniform

from .conftest import program_text


class TestSpace:
    def test_declarations(self, bool_space, password_space):
        assert [d.name for d in bool_space.visible] == ["v"]
        assert [d.name for d in bool_space.hidden] == ["h"]
        assert bool_space.position("h") == (Visibility.HID, 0)
        assert password_space.symbols == frozenset({"p1", "p2", "p3"})
        assert password_space.uniform_inner() == uniform([("p1",), ("p2",), ("p3",)])
        assert list(bool_space.visible_states()) == [(False,), (True,)]

    def test_domains_keep_bools_and_ints_apart(self):
        assert True in Domain.boolean()
        assert 1 not in Domain.boolean()
        assert True not in Domain.int_range(0, 3)
        assert 3 in Domain.int_range(0, 3)
        assert "p1" in Domain.symbols(["p1"])

    def test_bad_declarations(self):
        with pytest.raises(ParseError, match="declared twice"):
            parse_space("vis x: bool; hid x: {0..1};")
        with pytest.raises(ParseError, match="empty domain"):
            parse_space("hid h: {3..1};")
        with pytest.raises(ParseError, match="repeated symbol"):
            parse_space("hid p: {a, a};")

    def test_render_round_trip(self, byte_space):
        assert parse_space(byte_space.render()) == byte_space


class TestParser:
    def test_statement_shapes(self, byte_space):
        program = parse_program("v := h div 2; v := v div 2", byte_space)
        assert program == Seq(
            AssignVis("v", BinOp("div", Var("h"), Const(2))),
            AssignVis("v", BinOp("div", Var("v"), Const(2))),
        )
        assert parse_program("h := 0", byte_space) == AssignHid("h", Const(0))
        assert parse_program("if h = 0 then skip fi", byte_space) == If(
            BinOp("=", Var("h"), Const(0)), Skip(), Skip()
        )

    def test_sequence_is_right_nested(self, byte_space):
        program = parse_program("skip; reveal h; skip", byte_space)
        assert program == seq(Skip(), RevealExpr(Var("h")), Skip())

    def test_choice_binds_tighter_than_sequence(self, byte_space):
        program = parse_program("skip [1/2] reveal h; skip", byte_space)
        assert isinstance(program, Seq)
        assert isinstance(program.first, PChoice)
        grouped = parse_program("skip [1/2] (reveal h; skip)", byte_space)
        assert isinstance(grouped, PChoice)
        assert isinstance(grouped.right, Seq)

    def test_reveal_forms(self, bool_space):
        assert isinstance(parse_program("reveal h", bool_space), RevealExpr)
        assert isinstance(parse_program("reveal {{ true @ 1/4, false @ 3/4 }}", bool_space), RevealDist)
        assert isinstance(parse_program("reveal uniform{0..3}", bool_space), RevealDist)
        assert isinstance(parse_program("reveal point(h)", bool_space), RevealDist)

    def test_program_files(self):
        space, program = parse(program_text("guess_loop_half"))
        assert [d.name for d in space.decls] == ["p"]
        assert isinstance(program, While)
        assert isinstance(program.body, Scope)
        assert [d.name for d in program.body.decls] == ["g"]
        assert isinstance(program.body.body.first, ChooseVis)

    def test_symbols_are_constants(self, password_space):
        assert parse_expression("p = p2", password_space) == BinOp("=", Var("p"), Const("p2"))

    def test_tuples_and_negatives(self, byte_space):
        assert parse_expression("(h, -3)", byte_space) == TupleExpr((Var("h"), Const(-3)))
        assert parse_expression("-(h)", byte_space).operand == Var("h")

    def test_precedence(self, byte_space):
        expr = parse_expression("not h + 1 * 2 = 3 and true", byte_space)
        assert expr.op == "and"
        assert expr.left.operand.op == "="
        assert expr.left.operand.left.right.op == "*"

    @pytest.mark.parametrize(
        "text, message",
        [
            ("v := w", "unbound identifier 'w'"),
            ("w := 1", "undeclared variable 'w'"),
            ("reveal h = 1 = 1", "comparisons do not chain"),
            ("[[ vis w: bool; reveal w ]]", "local 'w' is read before it is assigned"),
            ("[[ vis v: bool; skip ]]", "declared twice"),
            ("v := 1;", "expected a statement"),
            ("while 1 do skip", "expected 'od'"),
            ("v ! 1", "unexpected character"),
        ],
    )
    def test_errors(self, byte_space, text, message):
        with pytest.raises(ParseError, match=message):
            parse_program(text, byte_space)

    def test_error_location(self, byte_space):
        with pytest.raises(ParseError) as info:
            parse_program("skip;\n  v := w", byte_space)
        assert (info.value.line, info.value.column) == (2, 8)

    def test_definite_assignment(self, byte_space):
        parse_program("[[ vis w: bool; w := true; reveal w ]]", byte_space)
        parse_program("[[ vis w: bool; (w := true [1/2] w := false); reveal w ]]", byte_space)
        with pytest.raises(ParseError, match="before it is assigned"):
            parse_program("[[ vis w: bool; (w := true [1/2] skip); reveal w ]]", byte_space)
        with pytest.raises(ParseError, match="before it is assigned"):
            parse_program("[[ vis w: bool; if h = 0 then w := true fi; reveal w ]]", byte_space)

    def test_implicit_locals_skip_definite_assignment(self, byte_space):
        program = parse_program("[[ vis w: bool; reveal w ]]", byte_space, implicit_uniform_locals=True)
        assert isinstance(program, Scope)

    def test_parse_value(self, password_space):
        assert parse_value("p2", password_space) == "p2"
        assert parse_value("(1, true)", password_space) == (1, True)
        assert parse_value("-2", password_space) == -2
        with pytest.raises(ParseError):
            parse_value("p", password_space)


class TestPrinter:
    def test_render_value(self):
        assert render_value(True) == "true"
        assert render_value(Fraction(3, 4)) == "3/4"
        assert render_value(Fraction(4, 2)) == "2"
        assert render_value(("p1", False)) == "(p1, false)"

    @pytest.mark.parametrize(
        "name",
        ["guess_once", "guess_loop_half", "guess_loop_straight", "channel_reveal", "halve_twice", "spin"],
    )
    def test_program_round_trip(self, name):
        space, program = parse(program_text(name))
        assert parse(pretty(program, space)) == (space, program)

    @pytest.mark.parametrize(
        "text",
        [
            "(skip; reveal h) [h / 4] v := 1",
            "reveal h mod 2 [1 / 2] (v := 1 [1 / 3] skip)",
            "(skip; skip); skip",
            "v := -(3) + 2 * (h - 1)",
            "{not (h = 0 or h = 1)}",
            "if v = 0 then skip else abort fi",
            "[[ hid k: {0..3}; k := h; reveal k div 2 ]]",
        ],
    )
    def test_statement_round_trip(self, byte_space, text):
        program = parse_program(text, byte_space)
        assert parse_program(pretty(program), byte_space) == program


class TestEvaluator:
    def test_arithmetic(self, byte_space):
        env = ((3,), (6,))
        assert eval_expr(parse_expression("h div 4 + v mod 2", byte_space), byte_space, *env) == 2
        assert eval_expr(parse_expression("h / 4", byte_space), byte_space, *env) == Fraction(3, 2)
        assert eval_expr(parse_expression("h / 3", byte_space), byte_space, *env) == 2

    def test_booleans_count_as_bits(self, bool_space):
        env = ((False,), (True,))
        assert eval_prob(parse_expression("h * (1/4)", bool_space), bool_space, *env) == Fraction(1, 4)
        assert eval_prob(parse_expression("v", bool_space), bool_space, *env) == 0

    def test_equality_is_typed(self, bool_space):
        env = ((False,), (True,))
        assert eval_expr(parse_expression("h = 1", bool_space), bool_space, *env) is False
        assert eval_expr(parse_expression("h != 1", bool_space), bool_space, *env) is True
        assert eval_expr(parse_expression("h = true", bool_space), bool_space, *env) is True

    def test_probability_range(self, byte_space):
        with pytest.raises(EvaluationError, match="outside") as info:
            eval_prob(parse_expression("h / 2", byte_space), byte_space, (0,), (6,))
        assert info.value.hidden == (6,)

    def test_runtime_errors_carry_the_state(self, byte_space):
        with pytest.raises(EvaluationError, match="by zero") as info:
            eval_expr(parse_expression("v div h", byte_space), byte_space, (1,), (0,))
        assert (info.value.visible, info.value.hidden) == ((1,), (0,))

    def test_distribution_expressions(self, bool_space):
        env = ((False,), (True,))
        channel = parse_program("reveal {{ true @ h * (1/4), false @ 1 - h * (1/4) }}", bool_space)
        assert eval_dist_expr(channel.dexpr, bool_space, *env) == Dist(
            {True: Fraction(1, 4), False: Fraction(3, 4)}
        )
        overfull = parse_program("reveal {{ 0 @ 3/4, 1 @ 1/2 }}", bool_space)
        with pytest.raises(EvaluationError, match="sum to"):
            eval_dist_expr(overfull.dexpr, bool_space, *env)

    def test_free_vars(self, byte_space):
        assert free_vars(parse_expression("(h, v + 1, 3)", byte_space)) == frozenset({"h", "v"})
