"""Response shapes for every object the CLI and the API render.

Rationals are "num/den" strings and program values are language literals,
so a dump with sorted keys is byte-stable for identical inputs.
"""

import json
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple
from pydantic import BaseModel, Field

from hyperflow.lang.printer import render_value
from hyperflow.lang.space import Space, VarDecl
from hyperflow.models.dist import Dist
from hyperflow.models.hyper import Hyper, InitState


def rational(x: Any) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _named(decls: Tuple[VarDecl, ...], values: Tuple[Any, ...]) -> Dict[str, str]:
    # Scoped locals never reach a rendered hyper, so names and values line up
    return {d.name: render_value(x) for d, x in zip(decls, values)}


def canonical_json(model: BaseModel) -> str:
    """Sorted-key JSON with no float formatting surprises."""
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False)


class HiddenPoint(BaseModel):
    hidden: Dict[str, str]
    prob: str


class HyperEntrySchema(BaseModel):
    visible: Dict[str, str]
    weight: str
    inner: List[HiddenPoint]


class HyperSchema(BaseModel):
    weight: str
    deficit: str
    entries: List[HyperEntrySchema] = Field(default=[])

    @staticmethod
    def inner_points(inner: Dist, space: Space) -> List[HiddenPoint]:
        return [HiddenPoint(hidden=_named(space.hidden, h), prob=rational(p)) for h, p in inner.items()]

    @classmethod
    def from_hyper(cls, hyper: Hyper, space: Space) -> "HyperSchema":
        return cls(
            weight=rational(hyper.weight),
            deficit=rational(1 - hyper.weight),
            entries=[
                HyperEntrySchema(
                    visible=_named(space.visible, key.v),
                    weight=rational(w),
                    inner=cls.inner_points(key.inner, space),
                )
                for key, w in hyper.items()
            ],
        )

    class Config:
        json_schema_extra = {
            "example": {
                "weight": "1/1",
                "deficit": "0/1",
                "entries": [
                    {
                        "visible": {"v": "true"},
                        "weight": "1/8",
                        "inner": [{"hidden": {"h": "true"}, "prob": "1/1"}],
                    },
                    {
                        "visible": {"v": "true"},
                        "weight": "7/8",
                        "inner": [
                            {"hidden": {"h": "false"}, "prob": "4/7"},
                            {"hidden": {"h": "true"}, "prob": "3/7"},
                        ],
                    },
                ],
            }
        }


class PriorSchema(BaseModel):
    visible: Dict[str, str]
    prior: List[HiddenPoint]

    @classmethod
    def from_state(cls, state: InitState, space: Space) -> "PriorSchema":
        return cls(visible=_named(space.visible, state.v), prior=HyperSchema.inner_points(state.inner, space))


class TransportCell(BaseModel):
    source: int = Field(..., ge=0)
    target: int = Field(..., ge=0)
    mass: str


class SlackCell(BaseModel):
    target: int = Field(..., ge=0)
    hidden: Dict[str, str]
    mass: str


class WitnessSchema(BaseModel):
    """Transport table between the canonical entry orders of ``source`` and ``target``."""

    secure: bool
    source: HyperSchema
    target: HyperSchema
    transport: List[TransportCell]
    slack: List[SlackCell] = Field(default=[])
    added_mass: str

    @classmethod
    def from_witness(cls, witness, space: Space) -> "WitnessSchema":
        return cls(
            secure=witness.secure,
            source=HyperSchema.from_hyper(witness.source, space),
            target=HyperSchema.from_hyper(witness.target, space),
            transport=[
                TransportCell(source=i, target=j, mass=rational(x))
                for (i, j), x in sorted(witness.transport.items())
            ],
            slack=[
                SlackCell(target=j, hidden=_named(space.hidden, h), mass=rational(gap))
                for (j, h), gap in sorted(witness.slack.items(), key=lambda item: item[0][0])
            ],
            added_mass=rational(witness.added_mass),
        )


class CounterexampleSchema(BaseModel):
    prior: PriorSchema
    lhs: HyperSchema
    rhs: HyperSchema


class VerdictSchema(BaseModel):
    relation: Literal["equiv", "refine", "entropy-refine"]
    holds: bool
    priors: int
    summary: str
    note: Optional[str] = None
    counterexample: Optional[CounterexampleSchema] = None
    witness: Optional[WitnessSchema] = None

    @classmethod
    def from_verdict(cls, verdict, space: Space, explain: bool = False) -> "VerdictSchema":
        bad = verdict.counterexample
        counterexample = None
        if bad is not None:
            counterexample = CounterexampleSchema(
                prior=PriorSchema.from_state(bad.state, space),
                lhs=HyperSchema.from_hyper(bad.lhs, space),
                rhs=HyperSchema.from_hyper(bad.rhs, space),
            )
        witness = None
        if explain and verdict.holds and verdict.witness is not None:
            witness = WitnessSchema.from_witness(verdict.witness, space)
        return cls(
            relation=verdict.relation,
            holds=verdict.holds,
            priors=len(verdict.results),
            summary=verdict.summary(),
            note=verdict.note,
            counterexample=counterexample,
            witness=witness,
        )


class InnerMeasureSchema(BaseModel):
    visible: Dict[str, str]
    weight: str
    inner: List[HiddenPoint]
    entropy_float: float
    risk: str


class LeakReportSchema(BaseModel):
    bits: bool
    weight: str
    deficit: str
    prior_entropy_float: float
    prior_risk: str
    prior_vulnerability: str
    posterior_entropy_float: Optional[float] = None
    posterior_risk: Optional[str] = None
    posterior_vulnerability: Optional[str] = None
    entropy_leak_float: Optional[float] = None
    multiplicative_leakage: Optional[str] = None
    additive_leakage: Optional[str] = None
    gauge_before: str
    gauge_after: str
    inners: List[InnerMeasureSchema] = Field(default=[])

    @classmethod
    def from_report(cls, report, space: Space) -> "LeakReportSchema":
        optional = lambda x: None if x is None else rational(x)
        return cls(
            bits=report.bits,
            weight=rational(report.weight),
            deficit=rational(report.deficit),
            prior_entropy_float=report.prior_entropy,
            prior_risk=rational(report.prior_risk),
            prior_vulnerability=rational(report.prior_vulnerability),
            posterior_entropy_float=report.posterior_entropy,
            posterior_risk=optional(report.posterior_risk),
            posterior_vulnerability=optional(report.posterior_vulnerability),
            entropy_leak_float=report.entropy_leak,
            multiplicative_leakage=optional(report.multiplicative_leakage),
            additive_leakage=optional(report.additive_leakage),
            gauge_before=rational(report.gauge_before),
            gauge_after=rational(report.gauge_after),
            inners=[
                InnerMeasureSchema(
                    visible=_named(space.visible, m.v),
                    weight=rational(m.weight),
                    inner=HyperSchema.inner_points(m.inner, space),
                    entropy_float=m.entropy,
                    risk=rational(m.risk),
                )
                for m in report.inners
            ],
        )


class LoopReportSchema(BaseModel):
    status: Literal["converged", "fixed_point", "diverged", "max_iterations", "exact"]
    converged: bool
    iterations: int
    deficit: str
    pending: str
    states: int
    hyper: HyperSchema

    @classmethod
    def from_report(cls, report, space: Space) -> "LoopReportSchema":
        return cls(
            status=report.status,
            converged=report.converged,
            iterations=report.iterations,
            deficit=rational(report.deficit),
            pending=rational(report.pending),
            states=report.states,
            hyper=HyperSchema.from_hyper(report.approximant, space),
        )


class ContextResultSchema(BaseModel):
    context: str
    holds: bool
    note: Optional[str] = None


class InstanceResultSchema(BaseModel):
    space: str
    lhs: str
    rhs: str
    holds: bool
    priors: int
    reverse_holds: Optional[bool] = None
    premise_holds: Optional[bool] = None
    note: Optional[str] = None
    error: Optional[str] = None
    contexts: List[ContextResultSchema] = Field(default=[])


class LawResultSchema(BaseModel):
    name: str
    relation: Literal["equiv", "refine"]
    strict: bool
    passed: bool
    strictness_shown: bool
    instances: List[InstanceResultSchema]


class CatalogReportSchema(BaseModel):
    passed: bool
    failed: List[str] = Field(default=[])
    laws: Dict[str, LawResultSchema]

    @classmethod
    def from_report(cls, report) -> "CatalogReportSchema":
        laws = {}
        for tag, result in report.laws.items():
            laws[tag] = LawResultSchema(
                name=result.law.name,
                relation=result.law.relation,
                strict=result.law.strict,
                passed=result.passed,
                strictness_shown=result.strictness_shown,
                instances=[
                    InstanceResultSchema(
                        space=i.space,
                        lhs=i.lhs,
                        rhs=i.rhs,
                        holds=i.holds,
                        priors=i.priors,
                        reverse_holds=i.reverse_holds,
                        premise_holds=i.premise_holds,
                        note=i.note,
                        error=i.error,
                        contexts=[ContextResultSchema(context=c.context, holds=c.holds, note=c.note) for c in i.contexts],
                    )
                    for i in result.instances
                ],
            )
        return cls(passed=report.passed, failed=report.failed, laws=laws)
