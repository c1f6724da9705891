"""Tests for prior specifications and initial states."""

import json
from fractions import Fraction

import pytest

from hyperflow.core.errors import EvaluationError, HyperflowError
from hyperflow.lang.parser import parse_space
from hyperflow.models.dist import Dist, point
from hyperflow.services.priors import initial_state, prior_from_mapping, resolve_prior, state_literal


@pytest.fixture
def pair_space():
    return parse_space("vis v: {0..3}; hid a: bool; hid b: {x, y};")


def test_uniform_and_point(password_space):
    assert resolve_prior("uniform", password_space) == password_space.uniform_inner()
    assert resolve_prior("point=p2", password_space) == point(("p2",))
    assert resolve_prior(" point=(p3) ", password_space) == point(("p3",))


def test_tuple_literals(pair_space):
    assert state_literal("(true, y)", pair_space, visible=False) == (True, "y")
    assert state_literal("2", pair_space, visible=True) == (2,)
    with pytest.raises(EvaluationError, match="components"):
        state_literal("true", pair_space, visible=False)
    with pytest.raises(EvaluationError, match="outside the domain"):
        state_literal("(1, y)", pair_space, visible=False)


def test_inline_mapping(password_space):
    prior = resolve_prior('{"p1": "1/2", "p3": "1/2"}', password_space)
    assert prior == Dist({("p1",): Fraction(1, 2), ("p3",): Fraction(1, 2)})


def test_prior_file(tmp_path, pair_space):
    path = tmp_path / "prior.json"
    path.write_text(json.dumps({"(true, x)": "1/3", "(false, y)": "2/3"}), encoding="utf-8")
    assert resolve_prior(str(path), pair_space) == Dist(
        {(True, "x"): Fraction(1, 3), (False, "y"): Fraction(2, 3)}
    )


@pytest.mark.parametrize(
    "spec, message",
    [
        ('{"p1": "1/2"}', "expected 1"),
        ('{"p1": "half", "p2": "1/2"}', "not a rational"),
        ('["p1"]', "must be an object"),
        ("{p1: 1}", "not valid JSON"),
        ("no/such/prior.json", "neither uniform"),
    ],
)
def test_bad_priors(password_space, spec, message):
    with pytest.raises(HyperflowError, match=message):
        resolve_prior(spec, password_space)


def test_mapping_weights_are_exact(password_space):
    prior = prior_from_mapping({"p1": 0.25, "p2": "3/4"}, password_space)
    assert prior[("p1",)] == Fraction(1, 4)


def test_initial_state(pair_space):
    state = initial_state(pair_space)
    assert state.v == (0,)
    assert state.inner == pair_space.uniform_inner()
    assert initial_state(pair_space, "point=(false, x)", "3").v == (3,)
    with pytest.raises(EvaluationError):
        initial_state(pair_space, visible="7")
