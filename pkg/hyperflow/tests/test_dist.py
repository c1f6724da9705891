"""Tests for exact distributions and the probability monad."""

from fractions import Fraction

import pytest

from hyperflow.core.errors import DistributionError
from hyperflow.models.dist import (
    Dist, add, as_prob, avg, bind, comprehend, condition, expected, map_dist, point, product, uniform,
)

fair = uniform([True, False])
pair = product(fair, fair)


def test_point_and_uniform():
    assert point(3).items() == ((3, Fraction(1)),)
    assert uniform(["p1", "p2", "p3"])["p2"] == Fraction(1, 3)
    assert uniform([True]) == point(True)
    assert uniform([0, 1, 1, 2, 3]) == uniform(range(4))


def test_uniform_of_nothing_fails():
    with pytest.raises(DistributionError, match="empty uniform"):
        uniform([])


def test_canonical_form():
    d = Dist([(2, Fraction(1, 4)), (1, Fraction(1, 4)), (2, Fraction(1, 4)), (3, 0)])
    assert d.support == (1, 2)
    assert d[2] == Fraction(1, 2)
    assert 3 not in d
    assert d == Dist({1: Fraction(1, 4), 2: Fraction(1, 2)})
    assert hash(d) == hash(Dist({2: Fraction(1, 2), 1: Fraction(1, 4)}))
    assert not d.is_full


def test_weight_bounds():
    with pytest.raises(DistributionError, match="exceeds 1"):
        Dist({0: Fraction(2, 3), 1: Fraction(2, 3)})
    with pytest.raises(DistributionError, match="negative"):
        Dist({0: Fraction(-1, 3)})
    with pytest.raises(DistributionError, match="inexact"):
        Dist({0: 0.5})
    with pytest.raises(DistributionError):
        as_prob(Fraction(3, 2))


def test_map_dist():
    assert map_dist(lambda x: "k", fair) == point("k")
    assert map_dist(lambda x: x, fair) == fair
    assert map_dist(lambda x: x // 2, uniform(range(4))) == Dist({0: Fraction(1, 2), 1: Fraction(1, 2)})
    with pytest.raises(DistributionError, match="undefined"):
        map_dist({0: 1}, uniform(range(2)))


def test_avg():
    inner_a = Dist({True: Fraction(1, 3), False: Fraction(2, 3)})
    inner_b = fair
    assert avg(Dist({inner_a: Fraction(3, 7), inner_b: Fraction(4, 7)})) == Dist(
        {True: Fraction(3, 7), False: Fraction(4, 7)}
    )
    assert avg(point(point(True))) == point(True)
    assert avg(point(inner_a)) == inner_a
    assert avg(Dist({point("a"): Fraction(1, 2), point("b"): Fraction(1, 2)})) == uniform(["a", "b"])
    with pytest.raises(DistributionError):
        avg(point(3))


def test_bind_is_avg_of_map():
    f = lambda x: uniform(range(x + 1))
    d = uniform(range(3))
    assert bind(d, f) == avg(map_dist(f, d))
    assert bind(point(2), f) == f(2)
    assert bind(d, point) == d


def test_expected():
    assert expected(uniform(range(4)), lambda x: x) == Fraction(3, 2)
    assert expected(Dist({0: Fraction(1, 3)}), lambda x: 1) == Fraction(1, 3)
    assert expected(pair, lambda xy: xy[0] or xy[1]) == Fraction(3, 4)


def test_two_children():
    both_boys = comprehend(pair, lambda xy: xy[0] or xy[1], lambda xy: xy[0] and xy[1])
    assert both_boys == Dist({True: Fraction(1, 3), False: Fraction(2, 3)})


def test_comprehend():
    assert comprehend(fair, lambda x: 1, lambda x: x) == fair
    assert comprehend(uniform(range(4)), lambda x: x >= 2) == uniform([2, 3])
    assert condition(uniform(range(4)), lambda x: x) == Dist(
        {1: Fraction(1, 6), 2: Fraction(1, 3), 3: Fraction(1, 2)}
    )
    with pytest.raises(DistributionError, match="measure-zero"):
        comprehend(fair, lambda x: 0)


def test_add_and_scale():
    half = point(0).scale(Fraction(1, 2))
    assert add([half, point(1).scale(Fraction(1, 2))]) == uniform([0, 1])
    assert (half + half) == point(0)
    with pytest.raises(DistributionError):
        add([point(0), point(1)])
    assert half.normalized() == point(0)


def test_mixed_value_order():
    quarter = Fraction(1, 4)
    d = Dist([("p1", quarter), ((1, 2), quarter), (0, quarter), (False, quarter)])
    assert d.support == (False, 0, "p1", (1, 2))
    assert d[False] == d[0] == Fraction(1, 4)
    assert True not in d and 1 not in d


def test_booleans_and_numbers_stay_apart():
    assert uniform([True, 1]) != point(1)
    assert len(uniform([False, 0, True, 1])) == 4
    assert point(True) != point(1)
    assert point((True,)) != point((1,))
    assert Dist([(True, Fraction(1, 2)), (1, Fraction(1, 2))])[1] == Fraction(1, 2)
    assert point(1) == point(Fraction(1))
