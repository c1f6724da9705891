"""Equivalence and refinement checking between programs over sampled priors.

"For every initial state" cannot be checked by enumeration, so a check runs
both programs from a seeded, deterministic family of priors and compares
the resulting hypers exactly. A passing verdict is a testing verdict over
that family, never a proof.

The same checks drive the bundled law catalog in ``hyperflow/data/laws.json``.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Literal, Mapping, Optional, Sequence

from hyperflow.core.config import settings
from hyperflow.core.errors import HyperflowError
from hyperflow.lang.ast import Program
from hyperflow.lang.parser import parse_program, parse_space
from hyperflow.lang.printer import render_value
from hyperflow.lang.space import Space
from hyperflow.models.dist import Dist, point, uniform, value_order_key
from hyperflow.models.hyper import Hyper, InitState
from hyperflow.schemas.catalog import Catalog, Law
from hyperflow.services.refine import Witness, entropy_refines, secure_refines
from hyperflow.services.semantics import HyperEvaluator

logger = logging.getLogger(__name__)

Relation = Literal["equiv", "refine", "entropy-refine"]

CATALOG_PATH = Path(__file__).resolve().parent.parent / "data" / "laws.json"
HOLE = "$HOLE"


@dataclass
class PriorSuite:
    """Initial states a check runs from.

    Every point prior, the uniform prior and ``random_priors`` seeded
    full-support priors, each paired with up to ``max_visible`` visible states.
    """

    priors: List[InitState]
    seed: int = 0
    random_priors: int = 0

    @classmethod
    def build(
        cls,
        space: Space,
        seed: Optional[int] = None,
        random_priors: Optional[int] = None,
        max_visible: Optional[int] = None,
    ) -> "PriorSuite":
        seed = settings.suite_seed if seed is None else seed
        random_priors = settings.suite_random_priors if random_priors is None else random_priors
        max_visible = settings.suite_max_visible if max_visible is None else max_visible
        if random_priors < 0:
            raise ValueError("random_priors must be nonnegative")
        rng = random.Random(seed)

        visible = list(space.visible_states())
        if len(visible) > max_visible:
            visible = sorted(rng.sample(visible, max_visible), key=value_order_key)
        hidden = list(space.hidden_states())
        inners = [point(h) for h in hidden] + [uniform(hidden)]
        for _ in range(random_priors):
            weights = [rng.randint(1, 9) for _ in hidden]
            total = sum(weights)
            inners.append(Dist((h, Fraction(w, total)) for h, w in zip(hidden, weights)))

        priors = list(dict.fromkeys(InitState(v, inner) for v in visible for inner in inners))
        logger.debug("prior suite: %d priors over %d visible states (seed %d)", len(priors), len(visible), seed)
        return cls(priors, seed, random_priors)

    @classmethod
    def of(cls, states: Sequence[InitState]) -> "PriorSuite":
        return cls(list(states))

    def __iter__(self) -> Iterator[InitState]:
        return iter(self.priors)

    def __len__(self) -> int:
        return len(self.priors)


@dataclass
class PriorOutcome:
    state: InitState
    holds: bool
    lhs: Hyper
    rhs: Hyper
    witness: Optional[Witness] = None


@dataclass
class Verdict:
    """Per-prior results of one relation check between two programs."""

    relation: Relation
    results: List[PriorOutcome] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.results)

    @property
    def counterexample(self) -> Optional[PriorOutcome]:
        return next((r for r in self.results if not r.holds), None)

    @property
    def witness(self) -> Optional[Witness]:
        """The witness at the first prior, when the relation produced one."""
        return self.results[0].witness if self.results else None

    def summary(self) -> str:
        if self.holds:
            return f"{self.relation} verified on {len(self.results)} priors"
        bad = self.counterexample
        return f"{self.relation} fails at visible {render_value(bad.state.v)}, prior {bad.state.inner!r}"


def _refinement_note(lhs: Hyper, rhs: Hyper, secure: bool) -> str:
    if secure and lhs.weight > rhs.weight:
        return f"specification terminates with {lhs.weight}, implementation only with {rhs.weight}"
    if not secure and lhs.weight != rhs.weight:
        return f"weights differ ({lhs.weight} vs {rhs.weight}); entropy refinement preserves weight"
    return "no merge plan carries the specification's inners onto the implementation's"


def _check(
    relation: Relation,
    lhs: Program,
    rhs: Program,
    space: Space,
    suite: Optional[PriorSuite],
    evaluator: Optional[HyperEvaluator],
) -> Verdict:
    suite = suite if suite is not None else PriorSuite.build(space)
    evaluator = evaluator or HyperEvaluator(space)
    decide: Optional[Callable[[Hyper, Hyper], Optional[Witness]]] = {
        "equiv": None,
        "refine": secure_refines,
        "entropy-refine": entropy_refines,
    }[relation]
    verdict = Verdict(relation)
    for state in suite:
        left = evaluator.denote(lhs, state, space)
        right = evaluator.denote(rhs, state, space)
        if decide is None:
            verdict.results.append(PriorOutcome(state, left == right, left, right))
            continue
        witness = decide(left, right)
        verdict.results.append(PriorOutcome(state, witness is not None, left, right, witness))
    bad = verdict.counterexample
    if bad is not None and decide is not None:
        verdict.note = _refinement_note(bad.lhs, bad.rhs, secure=relation == "refine")
    logger.debug(verdict.summary())
    return verdict


def check_equiv(
    lhs: Program,
    rhs: Program,
    space: Space,
    suite: Optional[PriorSuite] = None,
    evaluator: Optional[HyperEvaluator] = None,
) -> Verdict:
    """Equal output hypers at every prior of the suite."""
    return _check("equiv", lhs, rhs, space, suite, evaluator)


def check_refine(
    spec: Program,
    impl: Program,
    space: Space,
    suite: Optional[PriorSuite] = None,
    evaluator: Optional[HyperEvaluator] = None,
) -> Verdict:
    """Secure refinement ``spec ⊑ impl`` at every prior of the suite."""
    return _check("refine", spec, impl, space, suite, evaluator)


def check_entropy_refine(
    spec: Program,
    impl: Program,
    space: Space,
    suite: Optional[PriorSuite] = None,
    evaluator: Optional[HyperEvaluator] = None,
) -> Verdict:
    return _check("entropy-refine", spec, impl, space, suite, evaluator)


def check(
    relation: Relation,
    lhs: Program,
    rhs: Program,
    space: Space,
    suite: Optional[PriorSuite] = None,
    evaluator: Optional[HyperEvaluator] = None,
) -> Verdict:
    return _check(relation, lhs, rhs, space, suite, evaluator)


# Law catalog


@dataclass
class ContextResult:
    context: str
    holds: bool
    note: Optional[str] = None


@dataclass
class InstanceResult:
    space: str
    lhs: str
    rhs: str
    holds: bool
    priors: int = 0
    reverse_holds: Optional[bool] = None
    premise_holds: Optional[bool] = None
    note: Optional[str] = None
    contexts: List[ContextResult] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.holds and all(c.holds for c in self.contexts)


@dataclass
class LawResult:
    law: Law
    instances: List[InstanceResult] = field(default_factory=list)

    @property
    def strictness_shown(self) -> bool:
        """A strict law must fail in reverse on some instance."""
        return not self.law.strict or any(i.reverse_holds is False for i in self.instances)

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.instances) and self.strictness_shown


@dataclass
class CatalogReport:
    laws: Dict[str, LawResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.laws.values())

    @property
    def failed(self) -> List[str]:
        return [tag for tag, r in self.laws.items() if not r.passed]


def load_catalog(path: Optional[Path] = None) -> Catalog:
    """Read and validate a law catalog file."""
    return Catalog.model_validate_json(Path(path or CATALOG_PATH).read_text(encoding="utf-8"))


def plug(context: str, program_text: str) -> str:
    """Fill a one-hole context with a parenthesised program."""
    return context.replace(HOLE, f"( {program_text} )")


class CatalogRunner:
    """Runs catalog laws, sharing one evaluator and one prior suite per space."""

    def __init__(
        self,
        catalog: Catalog,
        space_overrides: Optional[Mapping[str, str]] = None,
        seed: Optional[int] = None,
        random_priors: Optional[int] = None,
        max_visible: Optional[int] = None,
        **evaluator_options,
    ):
        self.catalog = catalog
        self.declarations = {**catalog.spaces, **(space_overrides or {})}
        self.seed = seed
        self.random_priors = random_priors
        self.max_visible = max_visible
        # Catalog programs assign their locals before reading them
        self.evaluator_options = {"implicit_uniform_locals": False, **evaluator_options}
        self._spaces: Dict[str, Space] = {}
        self._evaluators: Dict[str, HyperEvaluator] = {}
        self._suites: Dict[str, PriorSuite] = {}

    def _setup(self, name: str) -> Space:
        if name not in self._spaces:
            if name not in self.declarations:
                raise HyperflowError(f"unknown space '{name}'")
            space = parse_space(self.declarations[name])
            self._spaces[name] = space
            self._evaluators[name] = HyperEvaluator(space, **self.evaluator_options)
            self._suites[name] = PriorSuite.build(space, self.seed, self.random_priors, self.max_visible)
        return self._spaces[name]

    def _holds(self, relation: str, lhs_text: str, rhs_text: str, space_name: str) -> Verdict:
        space = self._setup(space_name)
        lhs = parse_program(lhs_text, space)
        rhs = parse_program(rhs_text, space)
        kwargs = dict(suite=self._suites[space_name], evaluator=self._evaluators[space_name])
        if relation == "equiv":
            verdict = check_equiv(lhs, rhs, space, **kwargs)
            if verdict.holds:
                # Equality must also show up as refinement both ways
                for a, b in ((lhs, rhs), (rhs, lhs)):
                    mutual = check_refine(a, b, space, **kwargs)
                    if not mutual.holds:
                        return mutual
            return verdict
        return check_refine(lhs, rhs, space, **kwargs)

    def run_instance(self, law: Law, instance) -> InstanceResult:
        result = InstanceResult(instance.space, instance.lhs, instance.rhs, holds=False)
        try:
            if instance.premise is not None:
                premise = self._holds("refine", instance.premise.lhs, instance.premise.rhs, instance.space)
                result.premise_holds = premise.holds
                if not premise.holds:
                    result.note = f"premise fails: {premise.summary()}"
                    return result
            verdict = self._holds(law.relation, instance.lhs, instance.rhs, instance.space)
            result.holds = verdict.holds
            result.priors = len(verdict.results)
            result.note = None if verdict.holds else verdict.summary()
            if law.relation == "refine":
                result.reverse_holds = self._holds("refine", instance.rhs, instance.lhs, instance.space).holds
            for context in law.contexts:
                inside = self._holds(
                    law.relation, plug(context, instance.lhs), plug(context, instance.rhs), instance.space
                )
                result.contexts.append(
                    ContextResult(context, inside.holds, None if inside.holds else inside.summary())
                )
        except HyperflowError as e:
            logger.warning("law %s: instance '%s' failed to run: %s", law.tag, instance.lhs, e)
            result.error = str(e)
        return result

    def run_law(self, law: Law) -> LawResult:
        result = LawResult(law, [self.run_instance(law, instance) for instance in law.instances])
        # Denotations are memoised per law only
        for evaluator in self._evaluators.values():
            evaluator.clear_cache()
        logger.debug("law %s: %s", law.tag, "pass" if result.passed else "FAIL")
        return result

    def run(self, only: Optional[Sequence[str]] = None) -> CatalogReport:
        wanted = set(only) if only else None
        if wanted:
            unknown = wanted - {law.tag for law in self.catalog.laws}
            if unknown:
                raise HyperflowError(f"unknown law tags: {sorted(unknown)}")
        report = CatalogReport()
        for law in self.catalog.laws:
            if wanted is None or law.tag in wanted:
                report.laws[law.tag] = self.run_law(law)
        logger.info("law catalog: %d laws, %d failed", len(report.laws), len(report.failed))
        return report


def run_catalog(
    space_overrides: Optional[Mapping[str, str]] = None,
    only: Optional[Sequence[str]] = None,
    catalog: Optional[Catalog] = None,
    **options,
) -> CatalogReport:
    """Check every law of the bundled (or given) catalog."""
    runner = CatalogRunner(catalog or load_catalog(), space_overrides, **options)
    return runner.run(only)
