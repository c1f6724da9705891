"""Tests for leakage measures and leak reports."""

import math
from fractions import Fraction
from itertools import combinations

import pytest

from hyperflow.core.errors import MeasureError
from hyperflow.lang.parser import parse_program
from hyperflow.models.dist import Dist, point, uniform
from hyperflow.models.hyper import Hyper, InitState, point_hyper
from hyperflow.services.analysis import (
    additive_leakage, bayes_risk, bayes_vulnerability, cond_bayes_risk, cond_bayes_vulnerability, cond_shannon,
    leak_report, multiplicative_leakage, report, shannon,
)
from hyperflow.services.semantics import HyperEvaluator

from .conftest import T, coin

EPS = 1e-12


def test_shannon():
    assert shannon(point("x")) == 0.0
    assert shannon(uniform(range(5))) == pytest.approx(math.log(5), abs=EPS)
    third = Dist({True: Fraction(1, 3), False: Fraction(2, 3)})
    expected = -(1 / 3) * math.log(1 / 3) - (2 / 3) * math.log(2 / 3)
    assert shannon(third) == pytest.approx(expected, abs=EPS)
    assert shannon(uniform(range(8)), bits=True) == pytest.approx(3.0, abs=EPS)


def test_partial_inputs_are_rejected():
    partial = Dist({0: Fraction(1, 2)})
    with pytest.raises(MeasureError, match="partial"):
        shannon(partial)
    with pytest.raises(MeasureError):
        bayes_risk(partial)
    with pytest.raises(MeasureError):
        cond_shannon(Hyper.at((), point(T), Fraction(1, 2)))


def test_conditional_shannon():
    state = InitState((), coin(Fraction(1, 5)))
    assert cond_shannon(point_hyper(state)) == pytest.approx(shannon(state.inner), abs=EPS)
    revealed = Hyper([(InitState((), point(T)), Fraction(1, 8)), (InitState((), coin(Fraction(3, 7))), Fraction(7, 8))])
    assert cond_shannon(revealed) == pytest.approx(7 / 8 * shannon(coin(Fraction(3, 7))), abs=EPS)


def test_bayes_measures():
    assert bayes_risk(uniform(["p1", "p2", "p3"])) == Fraction(2, 3)
    assert bayes_vulnerability(coin(Fraction(1, 5))) == Fraction(4, 5)
    assert cond_bayes_risk(Hyper.at((), point(T))) == 0
    prior = uniform(range(4))
    split = Hyper([(InitState((), uniform([0, 1])), Fraction(1, 2)), (InitState((), uniform([2, 3])), Fraction(1, 2))])
    assert multiplicative_leakage(prior, split) == 2
    assert additive_leakage(prior, split) == Fraction(1, 4)


def test_single_guess_risk(guess_once):
    space, program = guess_once
    state = InitState((), space.uniform_inner())
    result = report(HyperEvaluator(space), program, state)
    assert result.prior_risk == Fraction(2, 3)
    assert result.posterior_risk == Fraction(1, 3)
    assert result.gauge_after > result.gauge_before
    assert result.entropy_leak > 0


def _two_guess_hyper(prior: Dist) -> Hyper:
    """Hits reveal the password; a miss leaves the prior on the two unguessed values."""
    hits = [(InitState((), point(h)), p * Fraction(2, 4)) for h, p in prior.items()]
    misses = []
    for guessed in combinations(prior.support, 2):
        rest = [(h, p) for h, p in prior.items() if h not in guessed]
        mass = sum(p for _, p in rest)
        misses.append((InitState((), Dist((h, p / mass) for h, p in rest)), mass / 6))
    return Hyper(hits + misses)


def test_two_guesses_from_the_uniform_prior(guess_pair):
    space, program = guess_pair
    state = InitState((), space.uniform_inner())
    hyper = HyperEvaluator(space).denote(program, state)
    assert hyper == _two_guess_hyper(state.inner)
    assert len(hyper) == 10
    assert [w for _, w in hyper.items()].count(Fraction(1, 8)) == 4
    assert [w for _, w in hyper.items()].count(Fraction(1, 12)) == 6
    assert cond_bayes_risk(hyper) == 1 - Fraction(2 + 1, 4)


def test_two_guesses_from_a_skewed_prior(guess_pair):
    space, program = guess_pair
    prior = Dist({("p1",): Fraction(1, 2), ("p2",): Fraction(1, 4), ("p3",): Fraction(1, 8), ("p4",): Fraction(1, 8)})
    hyper = HyperEvaluator(space).denote(program, InitState((), prior))
    assert hyper == _two_guess_hyper(prior)
    assert hyper[InitState((), point(("p1",)))] == Fraction(1, 4)
    assert hyper[InitState((), Dist({("p1",): Fraction(2, 3), ("p2",): Fraction(1, 3)}))] == Fraction(1, 8)
    assert cond_bayes_vulnerability(hyper) == Fraction(41, 48)
    assert cond_bayes_risk(hyper) == Fraction(7, 48)


def test_skip_leaks_nothing(bool_space):
    state = InitState((False,), coin(Fraction(1, 3)))
    result = report(HyperEvaluator(bool_space), parse_program("skip", bool_space), state)
    assert result.posterior_risk == result.prior_risk
    assert result.entropy_leak == pytest.approx(0.0, abs=EPS)
    assert result.multiplicative_leakage == 1
    assert result.additive_leakage == 0


def test_total_revelation(byte_space):
    state = InitState((0,), Dist({(h,): Fraction(h + 1, 36) for h in range(8)}))
    result = report(HyperEvaluator(byte_space), parse_program("reveal h", byte_space), state)
    assert result.posterior_entropy == 0.0
    assert result.posterior_risk == 0
    assert len(result.inners) == 8


def test_partial_output_omits_posterior():
    state = InitState((False,), uniform([(True,), (False,)]))
    result = leak_report(state, Hyper.at((False,), point(T), Fraction(1, 2)))
    assert result.deficit == Fraction(1, 2)
    assert result.posterior_entropy is None
    assert result.posterior_risk is None
    assert result.entropy_leak is None


def test_reveal_never_raises_risk(byte_space):
    evaluator = HyperEvaluator(byte_space)
    state = InitState((2,), Dist({(h,): Fraction(h + 1, 36) for h in range(8)}))
    for text in ("reveal h mod 2", "reveal h div 3", "reveal (h = v)", "reveal {{ 0 @ h / 7, 1 @ 1 - h / 7 }}"):
        result = report(evaluator, parse_program(text, byte_space), state)
        assert result.posterior_risk <= result.prior_risk
        assert result.posterior_entropy <= result.prior_entropy + EPS
