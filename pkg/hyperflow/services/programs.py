"""Program-text front door shared by the command line and the HTTP API.

Each method takes program texts, runs them under one ``RunConfig`` and
returns the rendered schema object.
"""

import logging
from typing import Optional, Sequence, Tuple

from hyperflow.core.config import RunConfig
from hyperflow.core.errors import HyperflowError
from hyperflow.lang.ast import Program, While
from hyperflow.lang.parser import parse
from hyperflow.lang.space import Space
from hyperflow.schemas.results import (
    CatalogReportSchema, HyperSchema, LeakReportSchema, LoopReportSchema, VerdictSchema,
)
from hyperflow.services.analysis import report as leak_report
from hyperflow.services.lawcheck import PriorSuite, check, run_catalog
from hyperflow.services.priors import initial_state
from hyperflow.services.semantics import HyperEvaluator

logger = logging.getLogger(__name__)


class ProgramService:
    """Runs program texts under one configuration."""

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig()

    def load(self, text: str) -> Tuple[Space, Program]:
        return parse(text, self.config.implicit_uniform_locals)

    def evaluator(self, space: Space) -> HyperEvaluator:
        return HyperEvaluator(
            space,
            tol=self.config.tol,
            max_k=self.config.loop_max_k,
            strategy=self.config.loop_strategy,
            state_limit=self.config.loop_state_limit,
            implicit_uniform_locals=self.config.implicit_uniform_locals,
        )

    def eval(self, text: str) -> HyperSchema:
        space, program = self.load(text)
        state = initial_state(space, self.config.prior, self.config.visible)
        hyper = self.evaluator(space).denote(program, state)
        return HyperSchema.from_hyper(hyper, space)

    def compare(self, spec_text: str, impl_text: str) -> Tuple[VerdictSchema, bool]:
        """The verdict and whether the relation held."""
        spec_space, spec = self.load(spec_text)
        impl_space, impl = self.load(impl_text)
        if spec_space != impl_space:
            raise HyperflowError(
                f"programs declare different variables: '{spec_space.render()}' vs '{impl_space.render()}'"
            )
        suite = PriorSuite.build(spec_space, self.config.seed, self.config.random_priors, self.config.max_visible)
        verdict = check(self.config.relation, spec, impl, spec_space, suite, self.evaluator(spec_space))
        logger.info(verdict.summary())
        return VerdictSchema.from_verdict(verdict, spec_space, self.config.explain), verdict.holds

    def entropy(self, text: str) -> LeakReportSchema:
        space, program = self.load(text)
        state = initial_state(space, self.config.prior, self.config.visible)
        result = leak_report(self.evaluator(space), program, state, self.config.bits)
        return LeakReportSchema.from_report(result, space)

    def loop(self, text: str) -> LoopReportSchema:
        space, program = self.load(text)
        if not isinstance(program, While):
            raise HyperflowError("the loop command needs a program that is a single while loop")
        state = initial_state(space, self.config.prior, self.config.visible)
        result = self.evaluator(space).loop_report(program.body, program.prob, state)
        return LoopReportSchema.from_report(result, space)

    def laws(self, only: Sequence[str] = ()) -> Tuple[CatalogReportSchema, bool]:
        report = run_catalog(
            space_overrides=self.config.spaces,
            only=list(only or self.config.only),
            seed=self.config.seed,
            random_priors=self.config.random_priors,
            max_visible=self.config.max_visible,
            tol=self.config.tol,
            max_k=self.config.loop_max_k,
            strategy=self.config.loop_strategy,
            state_limit=self.config.loop_state_limit,
        )
        return CatalogReportSchema.from_report(report), report.passed
