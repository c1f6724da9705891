"""Denotational evaluator: programs over a declared space to hyperdistributions.

Every atomic command builds the joint distribution over (visible, hidden)
that its classical update produces and hands it to ``rv``, which splits the
joint by what the observer can see. Compound commands are built from those
by Kleisli composition. Loops are least fixed points in the termination
order, computed either by an exact linear solve over the reachable loop
states or by iterating approximants.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, List, Literal, Optional, Sequence, Tuple

from hyperflow.core.config import settings
from hyperflow.core.errors import EvaluationError
from hyperflow.lang.ast import (
    Abort, Assert, AssignHid, AssignVis, ChooseHid, ChooseVis, Expr, If, PChoice, Program, RevealDist,
    RevealExpr, Scope, Seq, Skip, While,
)
from hyperflow.lang.evaluator import constant_value, eval_dist_expr, eval_expr, eval_prob
from hyperflow.lang.space import Space, VarDecl, Visibility
from hyperflow.models.dist import Dist, map_dist, point, uniform
from hyperflow.models.hyper import Hyper, InitState, joint, point_hyper, rv
from hyperflow.services.simplex import gauss_jordan

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

LoopStrategy = Literal["auto", "iterate"]
LoopStatus = Literal["converged", "fixed_point", "diverged", "max_iterations", "exact"]

Denotation = Callable[[InitState], Hyper]


@dataclass
class LoopReport:
    """Outcome of evaluating one loop from one initial state."""

    approximant: Hyper
    iterations: int
    deficit: Fraction
    status: LoopStatus
    pending: Fraction = ZERO
    states: int = 0

    @property
    def converged(self) -> bool:
        return self.status in ("converged", "fixed_point", "exact")


@dataclass
class PriorCheck:
    state: InitState
    passed: bool
    lhs: Hyper
    rhs: Hyper


@dataclass
class LoopEquivVerdict:
    """Per-prior results of the loop fixed-point equation plus the termination certificate."""

    results: List[PriorCheck] = field(default_factory=list)
    termination: Literal["certified", "unverified"] = "unverified"

    @property
    def equation_holds(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def passed(self) -> bool:
        return self.equation_holds and self.termination == "certified"

    @property
    def counterexample(self) -> Optional[PriorCheck]:
        return next((r for r in self.results if not r.passed), None)


def kleisli(hyper: Hyper, then: Denotation) -> Hyper:
    """Run ``then`` from every entry of ``hyper`` and reassemble, keeping the outer split."""
    pairs = []
    for state, w in hyper.items():
        pairs.extend((key, w * q) for key, q in then(state).items())
    return Hyper(pairs)


def kleisli_seq(first: Denotation, second: Denotation) -> Denotation:
    """Sequential composition of two denotations."""
    return lambda state: kleisli(first(state), second)


def _locals(decls: Sequence[VarDecl], visibility: Visibility) -> List[VarDecl]:
    return [d for d in decls if d.visibility is visibility]


def scope_push(decls: Sequence[VarDecl], hyper: Hyper, implicit_uniform_locals: bool = False) -> Hyper:
    """Append local coordinates to every entry.

    Locals start at the first value of their domain unless they are
    implicitly uniform, in which case visible locals split the hyper and
    hidden locals multiply every inner by a uniform distribution.
    """
    vis_locals = _locals(decls, Visibility.VIS)
    hid_locals = _locals(decls, Visibility.HID)
    if implicit_uniform_locals:
        vis_init = uniform(_tuples(vis_locals))
        hid_init = uniform(_tuples(hid_locals))
    else:
        vis_init = point(tuple(d.domain.values[0] for d in vis_locals))
        hid_init = point(tuple(d.domain.values[0] for d in hid_locals))
    pairs = []
    for state, w in hyper.items():
        inner = Dist((h + extra, p * q) for h, p in state.inner.items() for extra, q in hid_init.items())
        pairs.extend((InitState(state.v + extra, inner), w * q) for extra, q in vis_init.items())
    return Hyper(pairs)


def scope_pop(decls: Sequence[VarDecl], hyper: Hyper) -> Hyper:
    """Drop local coordinates: visible ones from keys, hidden ones by marginalising inners."""
    n_vis = len(_locals(decls, Visibility.VIS))
    n_hid = len(_locals(decls, Visibility.HID))
    pairs = []
    for state, w in hyper.items():
        v = state.v[: len(state.v) - n_vis]
        inner = map_dist(lambda h: h[: len(h) - n_hid], state.inner) if n_hid else state.inner
        pairs.append((InitState(v, inner), w))
    return Hyper(pairs)


def _tuples(decls: Sequence[VarDecl]):
    result = [()]
    for decl in decls:
        result = [prefix + (x,) for prefix in result for x in decl.domain.values]
    return result


def validate_state(space: Space, state: InitState) -> None:
    """Check an initial state belongs to ``space``."""
    visible = space.visible
    if len(state.v) != len(visible) or any(x not in d.domain for d, x in zip(visible, state.v)):
        raise EvaluationError(f"visible state {state.v!r} is not in the declared space")
    if not state.inner.is_full:
        raise EvaluationError(f"prior has weight {state.inner.weight}, expected 1")
    hidden = space.hidden
    for h in state.inner:
        if not isinstance(h, tuple) or len(h) != len(hidden) or any(x not in d.domain for d, x in zip(hidden, h)):
            raise EvaluationError(f"hidden state {h!r} is not in the declared space")


class HyperEvaluator:
    """Evaluates programs over one declared space, caching denotations.

    Loop options default to the global settings; each can be overridden per
    evaluator.
    """

    def __init__(
        self,
        space: Space,
        *,
        tol: Optional[Fraction] = None,
        max_k: Optional[int] = None,
        strategy: Optional[LoopStrategy] = None,
        state_limit: Optional[int] = None,
        implicit_uniform_locals: Optional[bool] = None,
    ):
        self.space = space
        self.tol = Fraction(tol) if tol is not None else settings.tol
        self.max_k = max_k if max_k is not None else settings.loop_max_k
        self.strategy = strategy or settings.loop_strategy
        self.state_limit = state_limit if state_limit is not None else settings.loop_state_limit
        self.implicit_uniform_locals = (
            implicit_uniform_locals if implicit_uniform_locals is not None else settings.implicit_uniform_locals
        )
        self.loop_reports: List[LoopReport] = []
        self._cache: Dict[Tuple[Program, Space, InitState], Hyper] = {}

    # Public entry points

    def denote(self, program: Program, state: InitState, space: Optional[Space] = None) -> Hyper:
        """The output hyper of ``program`` from ``state``."""
        space = space or self.space
        key = (program, space, state)
        cached = self._cache.get(key)
        if cached is None:
            cached = self._denote(program, space, state)
            self._cache[key] = cached
        return cached

    def denotation(self, program: Program, space: Optional[Space] = None) -> Denotation:
        return lambda state: self.denote(program, state, space)

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def clear_cache(self) -> None:
        """Drop memoised denotations; loop reports are kept."""
        self._cache.clear()

    # Structural recursion

    def _denote(self, program: Program, space: Space, state: InitState) -> Hyper:
        if isinstance(program, Skip):
            return point_hyper(state)
        if isinstance(program, Abort):
            return Hyper()
        if isinstance(program, Assert):
            return self._assert(space, state, lambda h: eval_prob(program.prob, space, state.v, h))
        if isinstance(program, (AssignVis, ChooseVis, AssignHid, ChooseHid)):
            return self._update(program, space, state)
        if isinstance(program, RevealExpr):
            return self._reveal(space, state, lambda h: point(eval_expr(program.expr, space, state.v, h)))
        if isinstance(program, RevealDist):
            return self._reveal(space, state, lambda h: eval_dist_expr(program.dexpr, space, state.v, h))
        if isinstance(program, Seq):
            return kleisli(self.denote(program.first, state, space), self.denotation(program.second, space))
        if isinstance(program, PChoice):
            return self._choice(space, state, program.prob, program.left, program.right)
        if isinstance(program, If):
            return self._choice(space, state, program.cond, program.then, program.orelse)
        if isinstance(program, While):
            return self._loop(space, state, program.prob, program.body)
        if isinstance(program, Scope):
            inner_space = space.extend(program.decls)
            pushed = scope_push(program.decls, point_hyper(state), self.implicit_uniform_locals)
            body = kleisli(pushed, self.denotation(program.body, inner_space))
            return scope_pop(program.decls, body)
        raise EvaluationError(f"not a program: {program!r}")

    def _assert(self, space: Space, state: InitState, weight: Callable[[Any], Fraction]) -> Hyper:
        """Terminate with the expected weight and condition the inner on survival."""
        pairs = [(h, p * weight(h)) for h, p in state.inner.items()]
        mass = sum((q for _, q in pairs), ZERO)
        if not mass:
            return Hyper()
        return Hyper.at(state.v, Dist((h, q / mass) for h, q in pairs), mass)

    def _update(self, program, space: Space, state: InitState) -> Hyper:
        visibility, index = space.position(program.name)
        decl = space.lookup(program.name)
        v = state.v
        pairs = []
        for h, p in state.inner.items():
            if isinstance(program, (AssignVis, AssignHid)):
                outcomes = ((eval_expr(program.expr, space, v, h), ONE),)
            else:
                outcomes = eval_dist_expr(program.dexpr, space, v, h).items()
            for value, q in outcomes:
                if value not in decl.domain:
                    raise EvaluationError(
                        f"value {value!r} outside the domain of '{decl.name}'", visible=v, hidden=h
                    )
                if visibility is Visibility.VIS:
                    pairs.append(((v[:index] + (value,) + v[index + 1:], h), p * q))
                else:
                    pairs.append(((v, h[:index] + (value,) + h[index + 1:]), p * q))
        return rv(Dist(pairs))

    def _reveal(self, space: Space, state: InitState, emitted: Callable[[Any], Dist]) -> Hyper:
        """Split by the emitted value, then forget it: only the posterior split remains."""
        pairs = []
        for h, p in state.inner.items():
            pairs.extend((((state.v, value), h), p * q) for value, q in emitted(h).items())
        split = rv(Dist(pairs))
        return Hyper((InitState(key.v[0], key.inner), w) for key, w in split.items())

    def _choice(self, space: Space, state: InitState, prob: Expr, left: Program, right: Program) -> Hyper:
        p = lambda h: eval_prob(prob, space, state.v, h)
        taken = self._assert(space, state, p)
        skipped = self._assert(space, state, lambda h: ONE - p(h))
        return Hyper(
            kleisli(taken, self.denotation(left, space)).items()
            + kleisli(skipped, self.denotation(right, space)).items()
        )

    # Loops

    def _loop_entry(self, space: Space, state: InitState, prob: Expr, body: Program) -> Hyper:
        entered = self._assert(space, state, lambda h: eval_prob(prob, space, state.v, h))
        return kleisli(entered, self.denotation(body, space))

    def _loop_exit(self, space: Space, state: InitState, prob: Expr) -> Hyper:
        return self._assert(space, state, lambda h: ONE - eval_prob(prob, space, state.v, h))

    def _loop(self, space: Space, state: InitState, prob: Expr, body: Program) -> Hyper:
        return self.loop_report(body, prob, state, space).approximant

    def loop_report(
        self, body: Program, prob: Expr, state: InitState, space: Optional[Space] = None
    ) -> LoopReport:
        """Evaluate one loop with the configured strategy and record how it went."""
        space = space or self.space
        report = None
        if self.strategy == "auto":
            report = self.solve_loop(body, prob, state, space)
            if report is None:
                logger.warning(
                    "loop reaches more than %d states; falling back to iteration", self.state_limit
                )
        if report is None:
            report = self.loop_fixpoint(body, prob, state, self.tol, self.max_k, space)
        if not report.converged:
            logger.warning(
                "loop did not converge (%s after %d iterations, deficit %s)",
                report.status, report.iterations, report.deficit,
            )
        self.loop_reports.append(report)
        return report

    def _iterate(
        self,
        space: Space,
        state: InitState,
        prob: Expr,
        body: Program,
        max_k: int,
        tol: Optional[Fraction],
    ) -> LoopReport:
        running: Dict[InitState, Fraction] = {state: ONE}
        exited: Dict[InitState, Fraction] = {}
        silent: set = set()
        status: LoopStatus = "max_iterations"
        k = 0
        while k < max_k:
            step: Dict[InitState, Fraction] = {}
            out = ZERO
            for s, mass in running.items():
                for key, w in self._loop_exit(space, s, prob).items():
                    exited[key] = exited.get(key, ZERO) + mass * w
                    out += mass * w
                for key, w in self._loop_entry(space, s, prob, body).items():
                    step[key] = step.get(key, ZERO) + mass * w
            k += 1
            running = step
            pending = sum(running.values(), ZERO)
            logger.debug("loop iteration %d: pending mass %s", k, pending)
            if not pending:
                status = "fixed_point"
                break
            if tol is not None and pending <= tol:
                status = "converged"
                break
            # A running distribution that recurs with nothing exiting in between never exits
            if out:
                silent.clear()
            snapshot: FrozenSet = frozenset(running.items())
            if tol is not None and snapshot in silent:
                status = "diverged"
                break
            silent.add(snapshot)
        approximant = Hyper(exited)
        return LoopReport(
            approximant=approximant,
            iterations=k,
            deficit=ONE - approximant.weight,
            status=status,
            pending=sum(running.values(), ZERO),
        )

    def loop_approximant(
        self, body: Program, prob: Expr, state: InitState, k: int, space: Optional[Space] = None
    ) -> LoopReport:
        """The k-th approximant of the loop from ``state``, starting at the empty hyper."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        report = self._iterate(space or self.space, state, prob, body, k, None)
        report.iterations = k
        return report

    def loop_fixpoint(
        self,
        body: Program,
        prob: Expr,
        state: InitState,
        tol: Fraction,
        max_k: int,
        space: Optional[Space] = None,
    ) -> LoopReport:
        """Iterate approximants until the running mass is within ``tol`` or stops changing."""
        if tol <= 0:
            raise ValueError("tol must be positive")
        return self._iterate(space or self.space, state, prob, body, max_k, Fraction(tol))

    def solve_loop(
        self, body: Program, prob: Expr, state: InitState, space: Optional[Space] = None
    ) -> Optional[LoopReport]:
        """Exact least fixed point over the states the loop can reach, or None past the state limit."""
        space = space or self.space
        order: List[InitState] = [state]
        index: Dict[InitState, int] = {state: 0}
        entries: List[Hyper] = []
        while len(entries) < len(order):
            entered = self._loop_entry(space, order[len(entries)], prob, body)
            entries.append(entered)
            for s in entered:
                if s not in index:
                    if len(order) >= self.state_limit:
                        return None
                    index[s] = len(order)
                    order.append(s)
        exits = [self._loop_exit(space, s, prob) for s in order]

        # Keep only the states from which some mass can still leave the loop
        predecessors: Dict[int, List[int]] = {}
        for i, entered in enumerate(entries):
            for s in entered:
                predecessors.setdefault(index[s], []).append(i)
        live = {i for i, out in enumerate(exits) if out}
        frontier = list(live)
        while frontier:
            for i in predecessors.get(frontier.pop(), ()):
                if i not in live:
                    live.add(i)
                    frontier.append(i)
        status: LoopStatus = "exact" if len(live) == len(order) else "diverged"

        if 0 not in live:
            approximant = Hyper()
        else:
            live_order = sorted(live)
            position = {i: r for r, i in enumerate(live_order)}
            matrix = []
            for i in live_order:
                row = [ZERO] * len(live_order)
                row[position[i]] = ONE
                for s, w in entries[i].items():
                    if index[s] in position:
                        row[position[index[s]]] -= w
                matrix.append(row)
            solution = gauss_jordan(matrix, [dict(exits[i].items()) for i in live_order])
            approximant = Hyper(solution[position[0]])
        logger.info("exact loop solve over %d states (%d live): %s", len(order), len(live), status)
        return LoopReport(
            approximant=approximant,
            iterations=0,
            deficit=ONE - approximant.weight,
            status=status,
            states=len(order),
        )

    def check_loop_equiv(
        self, body: Program, prob: Expr, candidate: Program, priors: Sequence[InitState]
    ) -> LoopEquivVerdict:
        """Check that ``candidate`` solves the loop's fixed-point equation at every prior.

        Termination is certified only for a constant continue probability below one.
        """
        unrolled = PChoice(prob, Seq(body, candidate), Skip())
        verdict = LoopEquivVerdict()
        for state in priors:
            lhs = self.denote(unrolled, state)
            rhs = self.denote(candidate, state)
            verdict.results.append(PriorCheck(state, lhs == rhs, lhs, rhs))
        constant = constant_value(prob)
        if constant is not None and not isinstance(constant, (str, tuple)) and 0 <= constant < 1:
            verdict.termination = "certified"
        return verdict


def denote(space: Space, program: Program, state: InitState, **options) -> Hyper:
    """Evaluate ``program`` once with a fresh evaluator."""
    return HyperEvaluator(space, **options).denote(program, state)


__all__ = [
    "HyperEvaluator",
    "LoopEquivVerdict",
    "LoopReport",
    "PriorCheck",
    "denote",
    "joint",
    "kleisli",
    "kleisli_seq",
    "rv",
    "scope_pop",
    "scope_push",
    "validate_state",
]
