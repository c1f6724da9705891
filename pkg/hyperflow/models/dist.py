"""Exact-rational discrete distributions and the probability monad.

A ``Dist`` is a finite-support map from values to nonnegative rationals of
total weight at most one. Zero entries are never stored and keys are kept in
a canonical total order, so structural equality is mathematical equality.
"""

from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, Mapping, Optional, Tuple, Union

from hyperflow.core.errors import DistributionError

Value = Hashable
Prob = Fraction
Weight = Union[bool, int, Fraction]
WeightFn = Callable[[Any], Weight]

ONE = Fraction(1)
ZERO = Fraction(0)


def as_fraction(weight: Weight) -> Fraction:
    """Coerce a weight to an exact rational; Booleans read as 0/1."""
    if isinstance(weight, bool):
        return ONE if weight else ZERO
    if isinstance(weight, (int, Fraction)):
        return Fraction(weight)
    raise DistributionError(f"inexact or non-numeric weight {weight!r}")


def as_prob(weight: Weight) -> Fraction:
    """Coerce to a rational and check it lies in [0, 1]."""
    p = as_fraction(weight)
    if p < 0 or p > 1:
        raise DistributionError(f"probability {p} outside [0, 1]")
    return p


def value_order_key(value: Any) -> Tuple:
    """Canonical total order over values: bools, numbers, symbols, tuples, dists."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, (int, Fraction)):
        return (1, value)
    if isinstance(value, str):
        return (2, value)
    if isinstance(value, tuple):
        return (3, len(value), tuple(value_order_key(v) for v in value))
    if isinstance(value, Dist):
        return (4, value.order_key)
    raise TypeError(f"value {value!r} has no canonical order")


class Dist:
    """Immutable finite (sub-)distribution with canonical key order."""

    __slots__ = ("_items", "_keys", "_map", "_weight", "_hash")

    def __init__(self, entries: Union[Mapping[Value, Weight], Iterable[Tuple[Value, Weight]]] = ()):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        # Keyed by the type-tagged order key, so True and 1 stay apart
        acc: Dict[Tuple, Tuple[Value, Fraction]] = {}
        for value, weight in pairs:
            p = as_fraction(weight)
            if p < 0:
                raise DistributionError(f"negative weight {p} for {value!r}")
            if p:
                key = value_order_key(value)
                held = acc.get(key)
                acc[key] = (value, p) if held is None else (held[0], held[1] + p)
        total = sum((p for _, p in acc.values()), ZERO)
        if total > 1:
            raise DistributionError(f"distribution weight {total} exceeds 1")
        keys = sorted(acc)
        self._items: Tuple[Tuple[Value, Fraction], ...] = tuple(acc[key] for key in keys)
        self._keys: Tuple[Tuple, ...] = tuple(keys)
        self._map = {key: p for key, (_, p) in acc.items()}
        self._weight = total
        self._hash: Optional[int] = None

    # Mapping-like access

    def __getitem__(self, value: Value) -> Fraction:
        return self._map.get(value_order_key(value), ZERO)

    def __contains__(self, value: Value) -> bool:
        return value_order_key(value) in self._map

    def __iter__(self) -> Iterator[Value]:
        return (value for value, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def items(self) -> Tuple[Tuple[Value, Fraction], ...]:
        return self._items

    @property
    def support(self) -> Tuple[Value, ...]:
        return tuple(value for value, _ in self._items)

    @property
    def weight(self) -> Fraction:
        return self._weight

    @property
    def is_full(self) -> bool:
        return self._weight == 1

    @property
    def order_key(self) -> Tuple:
        return tuple(zip(self._keys, (p for _, p in self._items)))

    def max_prob(self) -> Fraction:
        return max((p for _, p in self._items), default=ZERO)

    # Equality is structural on the canonical form

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return self._keys == other._keys and self._items == other._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.order_key)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{value!r}@{p}" for value, p in self._items)
        return "{{" + body + "}}"

    # Arithmetic on sub-distributions

    def scale(self, factor: Weight) -> "Dist":
        k = as_fraction(factor)
        return type(self)((value, p * k) for value, p in self._items)

    def __add__(self, other: "Dist") -> "Dist":
        if not isinstance(other, Dist):
            return NotImplemented
        return type(self)(self._items + other._items)

    def normalized(self) -> "Dist":
        if not self._weight:
            raise DistributionError("conditioning on measure-zero event")
        return type(self)((value, p / self._weight) for value, p in self._items)


def point(x: Value) -> Dist:
    """The distribution concentrated on ``x``."""
    return Dist(((x, ONE),))


def uniform(xs: Iterable[Value]) -> Dist:
    """Uniform distribution over the distinct elements of ``xs``."""
    values = {value_order_key(x): x for x in xs}
    if not values:
        raise DistributionError("empty uniform")
    p = Fraction(1, len(values))
    return Dist((x, p) for x in values.values())


def add(dists: Iterable[Dist]) -> Dist:
    """Pointwise sum; the result must still weigh at most one."""
    pairs = []
    for d in dists:
        pairs.extend(d.items())
    return Dist(pairs)


def map_dist(f: Union[Callable[[Value], Value], Mapping[Value, Value]], d: Dist) -> Dist:
    """Push-forward of ``d`` through ``f``; weight is preserved."""
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    pairs = []
    for x, p in d.items():
        try:
            pairs.append((fn(x), p))
        except (KeyError, TypeError) as e:
            raise DistributionError(f"pushforward undefined at {x!r}") from e
    return Dist(pairs)


def avg(dd: Dist) -> Dist:
    """Average a distribution of distributions."""
    pairs = []
    for inner, p in dd.items():
        if not isinstance(inner, Dist):
            raise DistributionError(f"avg expects distribution-valued support, got {inner!r}")
        pairs.extend((x, p * q) for x, q in inner.items())
    return Dist(pairs)


def bind(d: Dist, f: Callable[[Value], Dist]) -> Dist:
    """Kleisli extension: ``avg(map_dist(f, d))`` without building the middle layer."""
    pairs = []
    for x, p in d.items():
        pairs.extend((y, p * q) for y, q in f(x).items())
    return Dist(pairs)


def product(first: Dist, second: Dist) -> Dist:
    """Independent joint distribution over pairs."""
    return Dist(((x, y), p * q) for x, p in first.items() for y, q in second.items())


def expected(d: Dist, f: WeightFn) -> Fraction:
    """Expected value of ``f`` over ``d``; Boolean results count as 0/1."""
    total = ZERO
    for x, p in d.items():
        w = as_fraction(f(x))
        if w < 0:
            raise DistributionError(f"negative weight function value {w} at {x!r}")
        total += p * w
    return total


def comprehend(
    d: Dist,
    r: Optional[WeightFn] = None,
    e: Optional[Callable[[Value], Value]] = None,
) -> Dist:
    """General comprehension: push ``e`` over ``d`` reweighted by ``r``, then normalise.

    Without ``r`` this is the plain push-forward and no normalisation happens.
    """
    body = e if e is not None else (lambda x: x)
    if r is None:
        return map_dist(body, d)
    pairs = []
    denominator = ZERO
    for x, p in d.items():
        w = as_fraction(r(x))
        if w < 0:
            raise DistributionError(f"negative weight function value {w} at {x!r}")
        if w:
            denominator += p * w
            pairs.append((body(x), p * w))
    if not denominator:
        raise DistributionError("conditioning on measure-zero event")
    return Dist((y, q / denominator) for y, q in pairs)


def condition(d: Dist, r: WeightFn) -> Dist:
    """Bayesian revision of ``d`` by the (possibly non-Boolean) likelihood ``r``."""
    return comprehend(d, r)
