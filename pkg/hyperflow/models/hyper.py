"""Hyperdistributions over (visible state, hidden posterior) pairs."""

from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Tuple, Union

from hyperflow.core.errors import DistributionError
from hyperflow.models.dist import Dist, Weight, point, value_order_key

VisState = Tuple[Any, ...]
HidState = Tuple[Any, ...]


class InitState(NamedTuple):
    """An initial state: visible values known exactly, hidden values as a full prior."""

    v: VisState
    inner: Dist


class Hyper(Dist):
    """Sub-distribution over ``InitState`` keys whose inners are full distributions.

    Identical (v, inner) pairs merge on construction, which is how the
    canonical form of a hyper falls out of the canonical form of ``Dist``.
    """

    __slots__ = ()

    def __init__(self, entries: Union[Mapping[InitState, Weight], Iterable[Tuple[InitState, Weight]]] = ()):
        super().__init__(entries)
        for key in self.support:
            if not isinstance(key, InitState):
                raise DistributionError(f"hyper key {key!r} is not an (v, inner) state")
            if not isinstance(key.inner, Dist) or not key.inner.is_full:
                raise DistributionError(f"inner at visible {key.v!r} is not a full distribution")

    @classmethod
    def at(cls, v: VisState, inner: Dist, weight: Weight = 1) -> "Hyper":
        """Hyper with a single entry."""
        return cls(((InitState(tuple(v), inner), weight),))


def joint(state: InitState) -> Dist:
    """Joint distribution over (v, h) of a single initial state."""
    return Dist(((state.v, h), p) for h, p in state.inner.items())


def hyper_joint(hyper: Hyper) -> Dist:
    """Average a hyper back down to its joint over (v, h)."""
    return Dist(((key.v, h), p * q) for key, p in hyper.items() for h, q in key.inner.items())


def visible_marginal(hyper: Hyper) -> Dist:
    """Distribution of the visible state alone."""
    return Dist((key.v, p) for key, p in hyper.items())


def rv(joint_dist: Dist) -> Hyper:
    """Split a joint over (v, h) by its visible part, conditioning each block."""
    blocks: Dict[Tuple, Tuple[Any, List[Tuple[Any, Fraction]]]] = {}
    for (v, h), p in joint_dist.items():
        blocks.setdefault(value_order_key(v), (v, []))[1].append((h, p))
    entries = []
    for v, block in blocks.values():
        mass = sum((p for _, p in block), Fraction(0))
        entries.append((InitState(v, Dist((h, p / mass) for h, p in block)), mass))
    return Hyper(entries)


def point_hyper(state: InitState) -> Hyper:
    """The hyper that reveals nothing about ``state``."""
    return Hyper(point(state).items())
