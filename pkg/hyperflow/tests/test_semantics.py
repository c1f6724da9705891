"""Tests for the hyperdistribution evaluator."""

from fractions import Fraction

import pytest

from hyperflow.core.errors import EvaluationError
from hyperflow.lang.parser import parse, parse_program, parse_space
from hyperflow.models.dist import Dist, point, uniform
from hyperflow.models.hyper import Hyper, InitState, point_hyper, visible_marginal
from hyperflow.services.lawcheck import PriorSuite
from hyperflow.services.refine import entropy_refines, terminates_leq
from hyperflow.services.semantics import (
    HyperEvaluator, denote, kleisli_seq, scope_pop, scope_push, validate_state,
)

from .conftest import F, T, coin, program_text


def _uniform_state(space, v=None) -> InitState:
    v = v if v is not None else next(iter(space.visible_states()))
    return InitState(tuple(v), space.uniform_inner())


class TestAtomicCommands:
    def test_skip_and_abort(self, bool_space):
        state = _uniform_state(bool_space)
        assert denote(bool_space, parse_program("skip", bool_space), state) == point_hyper(state)
        assert denote(bool_space, parse_program("abort", bool_space), state) == Hyper()

    def test_noisy_channel_reveal(self, bool_space):
        state = _uniform_state(bool_space)
        _, program = parse(program_text("channel_reveal"))
        hyper = denote(bool_space, program, state)
        assert hyper == Hyper([
            (InitState((False,), point(T)), Fraction(1, 8)),
            (InitState((False,), coin(Fraction(3, 7))), Fraction(7, 8)),
        ])

    def test_post_processed_channel_leaks_less(self, bool_space):
        state = _uniform_state(bool_space)
        _, direct = parse(program_text("channel_reveal"))
        _, composed = parse(program_text("channel_reveal_composed"))
        noisier = denote(bool_space, composed, state)
        assert noisier == Hyper([
            (InitState((False,), coin(Fraction(5, 9))), Fraction(9, 16)),
            (InitState((False,), coin(Fraction(3, 7))), Fraction(7, 16)),
        ])
        assert entropy_refines(denote(bool_space, direct, state), noisier) is not None
        assert entropy_refines(noisier, denote(bool_space, direct, state)) is None

    def test_assertion_conditions_and_loses_mass(self, bool_space):
        state = _uniform_state(bool_space)
        assert denote(bool_space, parse_program("{h}", bool_space), state) == Hyper.at(
            (False,), point(T), Fraction(1, 2)
        )
        assert denote(bool_space, parse_program("{h}; {not h}", bool_space), state) == Hyper()
        assert denote(bool_space, parse_program("{1/3}", bool_space), state) == Hyper.at(
            (False,), uniform([T, F]), Fraction(1, 3)
        )

    def test_visible_assignment_leaks_every_step(self, byte_space):
        state = _uniform_state(byte_space)
        _, twice = parse(program_text("halve_twice"))
        _, once = parse(program_text("quarter"))
        halved = denote(byte_space, twice, state)
        quartered = denote(byte_space, once, state)
        assert len(halved) == 4 and len(quartered) == 2
        assert InitState((0,), uniform([(0,), (1,)])) in halved
        assert quartered[InitState((1,), uniform([(4,), (5,), (6,), (7,)]))] == Fraction(1, 2)
        assert visible_marginal(halved) == visible_marginal(quartered)

    def test_hidden_assignment_leaks_nothing(self, bool_space):
        state = InitState((False,), coin(Fraction(1, 3)))
        hyper = denote(bool_space, parse_program("h := not h", bool_space), state)
        assert hyper == Hyper.at((False,), coin(Fraction(2, 3)))

    def test_visible_choice_splits_the_hyper(self, byte_space):
        state = InitState((0,), point((5,)))
        hyper = denote(byte_space, parse_program("v :in uniform{0..3}", byte_space), state)
        assert visible_marginal(hyper) == uniform([(0,), (1,), (2,), (3,)])

    def test_domain_violation(self, byte_space):
        state = _uniform_state(byte_space)
        with pytest.raises(EvaluationError, match="outside the domain") as info:
            denote(byte_space, parse_program("v := h + 1", byte_space), state)
        assert info.value.hidden == (7,)

    def test_mixed_outcomes_each_identify_the_secret(self):
        space, program = parse("hid h: {0..1}; reveal {{ h = 0 @ 1/2, h @ 1/2 }}")
        state = InitState((), space.uniform_inner())
        half = Fraction(1, 2)
        assert denote(space, program, state) == Hyper([
            (InitState((), point((0,))), half),
            (InitState((), point((1,))), half),
        ])


class TestCompound:
    def test_probabilistic_choice(self, bool_space):
        state = _uniform_state(bool_space)
        hyper = denote(bool_space, parse_program("reveal h [1/2] skip", bool_space), state)
        assert hyper == Hyper([
            (InitState((False,), point(F)), Fraction(1, 4)),
            (InitState((False,), point(T)), Fraction(1, 4)),
            (InitState((False,), uniform([T, F])), Fraction(1, 2)),
        ])

    def test_hidden_guard_reveals_through_the_branch(self, bool_space):
        state = _uniform_state(bool_space)
        branching = parse_program("if h then v := true else v := false fi", bool_space)
        assert denote(bool_space, branching, state) == Hyper([
            (InitState((False,), point(F)), Fraction(1, 2)),
            (InitState((True,), point(T)), Fraction(1, 2)),
        ])

    def test_single_guess(self, guess_once):
        space, program = guess_once
        hyper = denote(space, program, _uniform_state(space))
        for guess in ("p1", "p2", "p3"):
            assert hyper[InitState((), point((guess,)))] == Fraction(1, 9)
            others = uniform([(p,) for p in ("p1", "p2", "p3") if p != guess])
            assert hyper[InitState((), others)] == Fraction(2, 9)
        assert len(hyper) == 6

    def test_hidden_local_is_marginalised(self, bool_space):
        state = InitState((True,), coin(Fraction(1, 3)))
        through_local = parse_program("[[ hid k: bool; k := h; reveal k ]]", bool_space)
        direct = parse_program("reveal h", bool_space)
        assert denote(bool_space, through_local, state) == denote(bool_space, direct, state)

    def test_one_time_pad_with_implicit_locals(self, bool_space):
        state = InitState((False,), coin(Fraction(1, 5)))
        padded = parse_program("[[ hid k: bool; reveal k = h ]]", bool_space, implicit_uniform_locals=True)
        hyper = denote(bool_space, padded, state, implicit_uniform_locals=True)
        assert hyper == point_hyper(state)

    def test_push_and_pop(self, bool_space):
        decls = parse(program_text("guess_once"))[1].decls
        state = InitState((), uniform([("p1",), ("p2",)]))
        pushed = scope_push(decls, point_hyper(state))
        assert pushed == Hyper.at(("p1",), state.inner)
        assert scope_pop(decls, pushed) == point_hyper(state)
        spread = scope_push(decls, point_hyper(state), implicit_uniform_locals=True)
        assert visible_marginal(spread) == uniform([("p1",), ("p2",), ("p3",)])

    def test_kleisli_sequencing(self, bool_space):
        def meaning(text, space=bool_space):
            program = parse_program(text, space)
            return lambda state: denote(space, program, state)

        state = InitState((True,), coin(Fraction(1, 3)))
        leaky = meaning("reveal h [1/2] skip")
        assert kleisli_seq(meaning("skip"), leaky)(state) == leaky(state)
        assert kleisli_seq(leaky, meaning("abort"))(state) == Hyper()

        six = parse_space("hid h: {0..5};")
        start = InitState((), six.uniform_inner())
        both = kleisli_seq(meaning("reveal h mod 2", six), meaning("reveal h mod 3", six))(start)
        assert both == denote(six, parse_program("reveal (h mod 2, h mod 3)", six), start)
        assert both == denote(six, parse_program("reveal h", six), start)

    def test_denotations_are_cached(self, bool_space):
        evaluator = HyperEvaluator(bool_space)
        program = parse_program("reveal h", bool_space)
        state = _uniform_state(bool_space)
        assert evaluator.denote(program, state) is evaluator.denote(program, state)
        assert evaluator.cache_size > 0
        evaluator.clear_cache()
        assert evaluator.cache_size == 0

    def test_validate_state(self, bool_space):
        validate_state(bool_space, _uniform_state(bool_space))
        with pytest.raises(EvaluationError, match="visible state"):
            validate_state(bool_space, InitState((0,), uniform([T, F])))
        with pytest.raises(EvaluationError, match="weight"):
            validate_state(bool_space, InitState((True,), Dist({T: Fraction(1, 2)})))
        with pytest.raises(EvaluationError, match="hidden state"):
            validate_state(bool_space, InitState((True,), point((1,))))


class TestLoops:
    def test_approximants(self, bool_space):
        evaluator = HyperEvaluator(bool_space)
        program = parse_program("while 1/2 do skip od", bool_space)
        state = _uniform_state(bool_space)
        bottom = evaluator.loop_approximant(program.body, program.prob, state, 0)
        assert bottom.approximant == Hyper() and bottom.deficit == 1
        third = evaluator.loop_approximant(program.body, program.prob, state, 3)
        assert third.approximant == Hyper([(state, Fraction(7, 8))])
        assert third.deficit == Fraction(1, 8)

    def test_approximants_form_a_chain(self, guess_loop):
        space, loop = guess_loop
        evaluator = HyperEvaluator(space)
        state = _uniform_state(space)
        chain = [evaluator.loop_approximant(loop.body, loop.prob, state, k) for k in range(8)]
        for k, report in enumerate(chain):
            assert report.deficit == Fraction(1, 2) ** k
        for lower, upper in zip(chain, chain[1:]):
            assert terminates_leq(lower.approximant, upper.approximant)

    def test_exact_solve_matches_straight_line_program(self, guess_loop, guess_straight):
        space, loop = guess_loop
        _, straight = guess_straight
        evaluator = HyperEvaluator(space)
        state = _uniform_state(space)
        report = evaluator.loop_report(loop.body, loop.prob, state)
        assert report.status == "exact" and report.converged
        assert report.deficit == 0
        assert report.approximant == evaluator.denote(straight, state)

    def test_iteration_stops_at_the_cap(self, guess_loop):
        space, loop = guess_loop
        evaluator = HyperEvaluator(space, strategy="iterate", max_k=20)
        report = evaluator.loop_report(loop.body, loop.prob, _uniform_state(space))
        assert report.status == "max_iterations"
        assert report.iterations == 20
        assert report.deficit == Fraction(1, 2) ** 20

    def test_iteration_converges_within_tolerance(self, guess_loop):
        space, loop = guess_loop
        evaluator = HyperEvaluator(space, strategy="iterate", tol=Fraction(1, 1000))
        report = evaluator.loop_report(loop.body, loop.prob, _uniform_state(space))
        assert report.status == "converged"
        assert report.iterations == 10
        assert report.pending <= Fraction(1, 1000)

    def test_guard_that_turns_false(self, byte_space):
        program = parse_program("while v < 3 do v := v + 1 od", byte_space)
        state = InitState((0,), uniform([(0,), (1,)]))
        exact = HyperEvaluator(byte_space).loop_report(program.body, program.prob, state)
        assert exact.status == "exact"
        assert exact.approximant == Hyper.at((3,), state.inner)
        iterated = HyperEvaluator(byte_space, strategy="iterate").loop_report(program.body, program.prob, state)
        assert iterated.status == "fixed_point"
        assert iterated.iterations == 4
        assert iterated.approximant == exact.approximant

    @pytest.mark.parametrize("strategy", ["auto", "iterate"])
    def test_divergent_loop(self, strategy):
        space, program = parse(program_text("spin"))
        evaluator = HyperEvaluator(space, strategy=strategy, max_k=100)
        report = evaluator.loop_report(program.body, program.prob, _uniform_state(space))
        assert report.status == "diverged"
        assert not report.converged
        assert report.deficit == 1
        assert report.approximant == Hyper()

    def test_state_limit_falls_back_to_iteration(self, guess_loop):
        space, loop = guess_loop
        evaluator = HyperEvaluator(space, state_limit=1, max_k=5)
        report = evaluator.loop_report(loop.body, loop.prob, _uniform_state(space))
        assert report.status == "max_iterations"
        assert evaluator.loop_reports[-1] is report

    def test_loop_equation_holds_for_the_straight_line_program(self, guess_loop, guess_straight):
        space, loop = guess_loop
        _, straight = guess_straight
        evaluator = HyperEvaluator(space)
        verdict = evaluator.check_loop_equiv(loop.body, loop.prob, straight, PriorSuite.build(space).priors)
        assert verdict.equation_holds
        assert verdict.termination == "certified"
        assert verdict.passed

    def test_loop_equation_fails_for_perturbed_weights(self, guess_loop):
        space, loop = guess_loop
        text = program_text("guess_loop_straight").replace("3/10 *", "31/100 *").replace("0 @ 1/2", "0 @ 49/100")
        _, perturbed = parse(text)
        evaluator = HyperEvaluator(space)
        verdict = evaluator.check_loop_equiv(loop.body, loop.prob, perturbed, PriorSuite.build(space).priors)
        assert not verdict.passed
        assert verdict.counterexample is not None

    def test_termination_needs_a_constant_guard(self, byte_space):
        program = parse_program("while v < 3 do v := v + 1 od", byte_space)
        evaluator = HyperEvaluator(byte_space)
        state = InitState((3,), uniform([(0,), (1,)]))
        verdict = evaluator.check_loop_equiv(program.body, program.prob, parse_program("skip", byte_space), [state])
        assert verdict.equation_holds
        assert verdict.termination == "unverified"
