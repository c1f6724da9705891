"""Refinement orders on hypers, decided by exact linear feasibility.

Entropy refinement ``s ⪯ i`` holds when the inners of ``s`` can be merged
(in weighted portions) into the inners of ``i``. The merge plan is a
transport table: ``x[i, j]`` is the mass of source entry ``i`` that ends up
in target entry ``j``. Secure refinement first lets termination add mass,
which shows up as per-column slack.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from hyperflow.core.errors import RefinementError
from hyperflow.models.dist import Dist
from hyperflow.models.hyper import Hyper, InitState
from hyperflow.services.simplex import find_feasible

logger = logging.getLogger(__name__)

ZERO = Fraction(0)

Cell = Tuple[int, int]


@dataclass
class Witness:
    """Transport table between the canonical entry orders of two hypers."""

    source: Hyper
    target: Hyper
    transport: Dict[Cell, Fraction]
    secure: bool = False
    slack: Dict[Tuple[int, Any], Fraction] = field(default_factory=dict)

    @classmethod
    def build(cls, source: Hyper, target: Hyper, transport: Dict[Cell, Fraction], secure: bool) -> "Witness":
        """Drop zero cells and recompute the column slack."""
        cells = {cell: Fraction(x) for cell, x in transport.items() if x}
        witness = cls(source, target, cells, secure)
        witness.slack = {key: gap for key, gap in witness.column_gaps().items() if gap}
        return witness

    @property
    def source_entries(self) -> Sequence[Tuple[InitState, Fraction]]:
        return self.source.items()

    @property
    def target_entries(self) -> Sequence[Tuple[InitState, Fraction]]:
        return self.target.items()

    def column_gaps(self) -> Dict[Tuple[int, Any], Fraction]:
        """``b_j·ε_j(h) − Σ_i x_ij·δ_i(h)`` for every target column and hidden value."""
        sources = self.source_entries
        gaps: Dict[Tuple[int, Any], Fraction] = {}
        for j, (state, weight) in enumerate(self.target_entries):
            for h, q in state.inner.items():
                gaps[(j, h)] = weight * q
        for (i, j), x in self.transport.items():
            for h, p in sources[i][0].inner.items():
                gaps[(j, h)] = gaps.get((j, h), ZERO) - x * p
        return gaps

    def validate(self) -> None:
        """Re-check every witness condition exactly; raises RefinementError on failure."""
        sources, targets = self.source_entries, self.target_entries
        rows = [ZERO] * len(sources)
        for (i, j), x in self.transport.items():
            if not (0 <= i < len(sources) and 0 <= j < len(targets)):
                raise RefinementError(f"transport cell {(i, j)} out of range")
            if x < 0:
                raise RefinementError(f"negative transport {x} at {(i, j)}")
            if sources[i][0].v != targets[j][0].v:
                raise RefinementError(f"transport {(i, j)} crosses visible states")
            rows[i] += x
        for i, (_, weight) in enumerate(sources):
            if rows[i] != weight:
                raise RefinementError(f"row {i} carries {rows[i]}, expected {weight}")
        for (j, h), gap in self.column_gaps().items():
            if gap < 0:
                raise RefinementError(f"column {j} overfilled at hidden {h!r} by {-gap}")
            if gap and not self.secure:
                raise RefinementError(f"column {j} underfilled at hidden {h!r} by {gap}")
            if self.secure and self.slack.get((j, h), ZERO) != gap:
                raise RefinementError(f"recorded slack for column {j} at {h!r} is stale")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except RefinementError:
            return False
        return True

    @property
    def added_mass(self) -> Fraction:
        """Total mass contributed by the termination step."""
        return sum(self.slack.values(), ZERO)


def _arity(x: Any) -> Optional[int]:
    return len(x) if isinstance(x, tuple) else None


def _check_compatible(*hypers: Hyper) -> None:
    shapes = {(_arity(key.v), _arity(next(iter(key.inner)))) for hyper in hypers for key in hyper}
    if len(shapes) > 1:
        raise RefinementError(f"hypers range over different state spaces: {shapes}")


def terminates_leq(a: Hyper, b: Hyper) -> bool:
    """Termination order: pointwise ``a.s <= b.s``."""
    _check_compatible(a, b)
    return all(p <= b[key] for key, p in a.items())


def gauge(hyper: Hyper) -> Fraction:
    """Sum-of-squares functional; strictly decreases under proper entropy refinement."""
    return sum((w * sum((q * q for _, q in key.inner.items()), ZERO) for key, w in hyper.items()), ZERO)


def identity_witness(hyper: Hyper) -> Witness:
    """The reflexivity witness: every entry carried through unchanged."""
    return Witness.build(hyper, hyper, {(i, i): w for i, (_, w) in enumerate(hyper.items())}, secure=False)


def _solve(source: Hyper, target: Hyper, secure: bool) -> Optional[Witness]:
    sources, targets = source.items(), target.items()
    by_visible: Dict[Any, Tuple[List[int], List[int]]] = {}
    for i, (state, _) in enumerate(sources):
        by_visible.setdefault(state.v, ([], []))[0].append(i)
    for j, (state, _) in enumerate(targets):
        by_visible.setdefault(state.v, ([], []))[1].append(j)

    transport: Dict[Cell, Fraction] = {}
    for v, (rows_i, cols_j) in by_visible.items():
        # One independent system per visible state
        cells = [
            (i, j) for i in rows_i for j in cols_j
            if all(h in targets[j][0].inner for h in sources[i][0].inner)
        ]
        columns = [(j, h) for j in cols_j for h in targets[j][0].inner]
        n_vars = len(cells) + (len(columns) if secure else 0)
        rows: List[List[Fraction]] = []
        rhs: List[Fraction] = []
        for i in rows_i:
            rows.append([Fraction(1) if cell[0] == i else ZERO for cell in cells] + [ZERO] * (n_vars - len(cells)))
            rhs.append(sources[i][1])
        for c, (j, h) in enumerate(columns):
            row = [sources[i][0].inner[h] if cj == j else ZERO for (i, cj) in cells]
            if secure:
                row += [Fraction(1) if k == c else ZERO for k in range(len(columns))]
            rows.append(row)
            rhs.append(targets[j][1] * targets[j][0].inner[h])
        logger.debug("refinement system at visible %r: %d rows, %d variables", v, len(rows), n_vars)
        solution = find_feasible(rows, rhs, n_vars)
        if solution is None:
            return None
        transport.update((cell, x) for cell, x in zip(cells, solution) if x)

    witness = Witness.build(source, target, transport, secure)
    witness.validate()
    return witness


def entropy_refines(s: Hyper, i: Hyper) -> Optional[Witness]:
    """Witness for ``s ⪯ i``, or None when no merge plan exists."""
    _check_compatible(s, i)
    if s == i:
        return identity_witness(s)
    if s.weight != i.weight:
        return None
    return _solve(s, i, secure=False)


def secure_refines(s: Hyper, i: Hyper) -> Optional[Witness]:
    """Witness for ``s ⊑ i``: termination may add mass before the merge."""
    _check_compatible(s, i)
    if s == i:
        witness = identity_witness(s)
        witness.secure = True
        return witness
    if s.weight > i.weight:
        return None
    return _solve(s, i, secure=True)


def compose_witness(first: Witness, second: Witness) -> Witness:
    """Chain ``A ⪯ B`` and ``B ⪯ C`` into ``A ⪯ C`` by splitting each middle column."""
    if first.target != second.source:
        raise RefinementError("witnesses do not share their middle hyper")
    middle = first.target.items()
    outgoing: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (j, k), y in second.transport.items():
        outgoing.setdefault(j, []).append((k, y))
    transport: Dict[Cell, Fraction] = {}
    for (i, j), x in first.transport.items():
        b_j = middle[j][1]
        if not b_j:
            continue
        for k, y in outgoing.get(j, ()):
            transport[(i, k)] = transport.get((i, k), ZERO) + x * y / b_j
    witness = Witness.build(first.source, second.target, transport, first.secure or second.secure)
    witness.validate()
    return witness


def merge_inners(hyper: Hyper, a: InitState, b: InitState) -> Hyper:
    """Merge two whole entries that share a visible state into their weighted average."""
    if a == b:
        return hyper
    wa, wb = hyper[a], hyper[b]
    if not wa or not wb:
        raise RefinementError("both entries must be present in the hyper")
    if a.v != b.v:
        raise RefinementError("cannot merge inners with different visible states")
    total = wa + wb
    pairs = [(h, wa * p / total) for h, p in a.inner.items()] + [(h, wb * p / total) for h, p in b.inner.items()]
    merged = InitState(a.v, Dist(pairs))
    rest = [(key, w) for key, w in hyper.items() if key not in (a, b)]
    return Hyper(rest + [(merged, total)])


def chain_supremum(hypers: Sequence[Hyper]) -> Hyper:
    """Pointwise supremum of a finite termination chain."""
    for lower, upper in zip(hypers, hypers[1:]):
        if not terminates_leq(lower, upper):
            raise RefinementError("hypers do not form a termination chain")
    best: Dict[InitState, Fraction] = {}
    for hyper in hypers:
        for key, w in hyper.items():
            if w > best.get(key, ZERO):
                best[key] = w
    return Hyper(best)
