"""Test configuration and fixtures."""

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

from hyperflow.lang.parser import parse, parse_space
from hyperflow.models.dist import Dist, point
from hyperflow.models.hyper import Hyper, InitState

PROGRAMS_DIR = Path(__file__).resolve().parents[2] / "programs"

T, F = (True,), (False,)

settings.register_profile("hyperflow", max_examples=500, derandomize=True, deadline=None)
settings.load_profile("hyperflow")


def coin(p) -> Dist:
    """Inner over one hidden Boolean with ``true`` at probability ``p``."""
    p = Fraction(p)
    return Dist({T: p, F: 1 - p})


def hyper_of(*entries, v=()) -> Hyper:
    """Hyper at a single visible state from (inner, weight) pairs."""
    return Hyper((InitState(v, inner), Fraction(w)) for inner, w in entries)


def program_text(name: str) -> str:
    return (PROGRAMS_DIR / f"{name}.hf").read_text(encoding="utf-8")


@pytest.fixture
def programs_dir() -> Path:
    return PROGRAMS_DIR


@pytest.fixture
def bool_space():
    return parse_space("vis v: bool; hid h: bool;")


@pytest.fixture
def byte_space():
    return parse_space("vis v: {0..7}; hid h: {0..7};")


@pytest.fixture
def password_space():
    return parse_space("hid p: {p1, p2, p3};")


@pytest.fixture
def merge_pair():
    """A three-inner hyper and the hyper got by merging its first two inners."""
    d1 = coin(Fraction(1, 3))
    d2 = coin(Fraction(1, 2))
    d3 = point(T)
    source = hyper_of((d1, Fraction(1, 4)), (d2, Fraction(1, 3)), (d3, Fraction(5, 12)))
    target = hyper_of((coin(Fraction(3, 7)), Fraction(7, 12)), (d3, Fraction(5, 12)))
    return source, target, (d1, d2, d3)


@pytest.fixture
def splitting_chain():
    """Three hypers, each merging parts of the previous one's inners."""
    first = hyper_of((coin(0), Fraction(1, 2)), (coin(1), Fraction(1, 2)))
    second = hyper_of((coin(0), Fraction(1, 4)), (coin(Fraction(1, 2)), Fraction(1, 2)), (coin(1), Fraction(1, 4)))
    third = hyper_of(
        (coin(0), Fraction(1, 8)),
        (coin(Fraction(1, 4)), Fraction(1, 4)),
        (coin(Fraction(1, 2)), Fraction(1, 4)),
        (coin(Fraction(3, 4)), Fraction(1, 4)),
        (coin(1), Fraction(1, 8)),
    )
    return first, second, third


@pytest.fixture
def guess_once():
    return parse(program_text("guess_once"))


@pytest.fixture
def guess_pair():
    return parse(program_text("guess_pair"))


@pytest.fixture
def guess_loop():
    return parse(program_text("guess_loop_half"))


@pytest.fixture
def guess_straight():
    return parse(program_text("guess_loop_straight"))
