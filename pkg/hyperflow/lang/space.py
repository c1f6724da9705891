"""Variable declarations and the state spaces they induce."""

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Any, Dict, FrozenSet, Iterator, Optional, Sequence, Tuple

from hyperflow.core.errors import ParseError
from hyperflow.models.dist import Dist, uniform


class Visibility(str, Enum):
    """Who can see a variable."""

    VIS = "vis"
    HID = "hid"


class DomainKind(str, Enum):
    BOOL = "bool"
    RANGE = "range"
    ENUM = "enum"


@dataclass(frozen=True)
class Domain:
    """A finite set of values, remembering how it was written."""

    kind: DomainKind
    values: Tuple[Any, ...]

    @classmethod
    def boolean(cls) -> "Domain":
        return cls(DomainKind.BOOL, (False, True))

    @classmethod
    def int_range(cls, lo: int, hi: int) -> "Domain":
        if lo > hi:
            raise ParseError(f"empty domain {{{lo}..{hi}}}")
        return cls(DomainKind.RANGE, tuple(range(lo, hi + 1)))

    @classmethod
    def symbols(cls, names: Sequence[str]) -> "Domain":
        if not names:
            raise ParseError("empty domain")
        if len(set(names)) != len(names):
            raise ParseError(f"repeated symbol in domain {{{', '.join(names)}}}")
        return cls(DomainKind.ENUM, tuple(names))

    def __contains__(self, value: Any) -> bool:
        if self.kind is DomainKind.BOOL:
            return isinstance(value, bool)
        if self.kind is DomainKind.RANGE:
            return not isinstance(value, (bool, str)) and value in self.values
        return isinstance(value, str) and value in self.values

    def render(self) -> str:
        if self.kind is DomainKind.BOOL:
            return "bool"
        if self.kind is DomainKind.RANGE:
            return f"{{{self.values[0]}..{self.values[-1]}}}"
        return "{" + ", ".join(self.values) + "}"


@dataclass(frozen=True)
class VarDecl:
    name: str
    visibility: Visibility
    domain: Domain

    def render(self) -> str:
        return f"{self.visibility.value} {self.name}: {self.domain.render()};"


@dataclass(frozen=True)
class Space:
    """Ordered declarations; visible and hidden states are tuples in declaration order."""

    decls: Tuple[VarDecl, ...] = ()

    def __post_init__(self):
        names = [d.name for d in self.decls]
        seen = set()
        for name in names:
            if name in seen:
                raise ParseError(f"variable '{name}' declared twice")
            seen.add(name)

    @property
    def visible(self) -> Tuple[VarDecl, ...]:
        return tuple(d for d in self.decls if d.visibility is Visibility.VIS)

    @property
    def hidden(self) -> Tuple[VarDecl, ...]:
        return tuple(d for d in self.decls if d.visibility is Visibility.HID)

    @property
    def symbols(self) -> FrozenSet[str]:
        return frozenset(
            value for d in self.decls if d.domain.kind is DomainKind.ENUM for value in d.domain.values
        )

    def lookup(self, name: str) -> Optional[VarDecl]:
        for decl in self.decls:
            if decl.name == name:
                return decl
        return None

    def position(self, name: str) -> Tuple[Visibility, int]:
        """Visibility of ``name`` and its index within the visible or hidden tuple."""
        decl = self.lookup(name)
        if decl is None:
            raise KeyError(name)
        group = self.visible if decl.visibility is Visibility.VIS else self.hidden
        return decl.visibility, [d.name for d in group].index(name)

    def extend(self, decls: Sequence[VarDecl]) -> "Space":
        """Space with local declarations appended (their coordinates come last)."""
        return Space(self.decls + tuple(decls))

    def env(self, v: Tuple[Any, ...], h: Tuple[Any, ...]) -> Dict[str, Any]:
        """Name-to-value binding of a state."""
        bindings = {d.name: x for d, x in zip(self.visible, v)}
        bindings.update((d.name, x) for d, x in zip(self.hidden, h))
        return bindings

    def visible_states(self) -> Iterator[Tuple[Any, ...]]:
        return product(*(d.domain.values for d in self.visible))

    def hidden_states(self) -> Iterator[Tuple[Any, ...]]:
        return product(*(d.domain.values for d in self.hidden))

    def uniform_inner(self) -> Dist:
        return uniform(self.hidden_states())

    def render(self) -> str:
        return "\n".join(d.render() for d in self.decls)
