"""Leakage measures over distributions and hypers."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from hyperflow.core.errors import MeasureError
from hyperflow.lang.ast import Program
from hyperflow.models.dist import Dist
from hyperflow.models.hyper import Hyper, InitState, point_hyper
from hyperflow.services.refine import gauge
from hyperflow.services.semantics import HyperEvaluator

logger = logging.getLogger(__name__)

LN2 = math.log(2)


def _require_full(d: Dist, what: str) -> None:
    if not d.is_full:
        raise MeasureError(f"{what} of a partial distribution (weight {d.weight}) is undefined")


def shannon(d: Dist, bits: bool = False) -> float:
    """Shannon entropy, natural log unless ``bits``."""
    _require_full(d, "entropy")
    h = -sum(float(p) * math.log(float(p)) for _, p in d.items())
    h = h + 0.0  # no negative zero for point distributions
    return h / LN2 if bits else h


def cond_shannon(hyper: Hyper, bits: bool = False) -> float:
    """Expected entropy of the inners."""
    _require_full(hyper, "conditional entropy")
    return sum(float(w) * shannon(key.inner, bits) for key, w in hyper.items())


def bayes_vulnerability(d: Dist) -> Fraction:
    """Chance that one optimal guess is right."""
    _require_full(d, "vulnerability")
    return d.max_prob()


def bayes_risk(d: Dist) -> Fraction:
    return 1 - bayes_vulnerability(d)


def cond_bayes_vulnerability(hyper: Hyper) -> Fraction:
    _require_full(hyper, "conditional vulnerability")
    return sum((w * key.inner.max_prob() for key, w in hyper.items()), Fraction(0))


def cond_bayes_risk(hyper: Hyper) -> Fraction:
    """Expected chance that one optimal guess per inner is wrong."""
    return 1 - cond_bayes_vulnerability(hyper)


def multiplicative_leakage(prior: Dist, hyper: Hyper) -> Fraction:
    return cond_bayes_vulnerability(hyper) / bayes_vulnerability(prior)


def additive_leakage(prior: Dist, hyper: Hyper) -> Fraction:
    return cond_bayes_vulnerability(hyper) - bayes_vulnerability(prior)


@dataclass
class InnerMeasure:
    """One entry of the output hyper with its own measures."""

    v: tuple
    inner: Dist
    weight: Fraction
    entropy: float
    risk: Fraction


@dataclass
class LeakReport:
    """Before/after measures of a program run from one initial state.

    Posterior fields stay None when the output hyper is partial.
    """

    prior_entropy: float
    prior_risk: Fraction
    prior_vulnerability: Fraction
    gauge_before: Fraction
    gauge_after: Fraction
    weight: Fraction
    deficit: Fraction
    posterior_entropy: Optional[float] = None
    posterior_risk: Optional[Fraction] = None
    posterior_vulnerability: Optional[Fraction] = None
    multiplicative_leakage: Optional[Fraction] = None
    additive_leakage: Optional[Fraction] = None
    bits: bool = False
    inners: List[InnerMeasure] = field(default_factory=list)

    @property
    def entropy_leak(self) -> Optional[float]:
        if self.posterior_entropy is None:
            return None
        return self.prior_entropy - self.posterior_entropy


def leak_report(state: InitState, output: Hyper, bits: bool = False) -> LeakReport:
    """Assemble every measure for an input state and the hyper it produced."""
    prior = state.inner
    report = LeakReport(
        prior_entropy=shannon(prior, bits),
        prior_risk=bayes_risk(prior),
        prior_vulnerability=bayes_vulnerability(prior),
        gauge_before=gauge(point_hyper(state)),
        gauge_after=gauge(output),
        weight=output.weight,
        deficit=1 - output.weight,
        bits=bits,
        inners=[
            InnerMeasure(key.v, key.inner, w, shannon(key.inner, bits), bayes_risk(key.inner))
            for key, w in output.items()
        ],
    )
    if output.is_full:
        report.posterior_entropy = cond_shannon(output, bits)
        report.posterior_risk = cond_bayes_risk(output)
        report.posterior_vulnerability = cond_bayes_vulnerability(output)
        report.multiplicative_leakage = multiplicative_leakage(prior, output)
        report.additive_leakage = additive_leakage(prior, output)
    else:
        logger.info("output weight %s < 1; posterior measures omitted", output.weight)
    return report


def report(evaluator: HyperEvaluator, program: Program, state: InitState, bits: bool = False) -> LeakReport:
    """Run ``program`` from ``state`` and measure what it leaked."""
    return leak_report(state, evaluator.denote(program, state), bits)
