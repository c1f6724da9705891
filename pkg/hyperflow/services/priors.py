"""Initial states from user-facing prior specifications.

A prior spec is ``uniform``, ``point=<hidden literal>``, or a mapping from
hidden-state literals to rational strings (the JSON prior file format).
With a single hidden variable a bare literal stands for the 1-tuple.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

from hyperflow.core.errors import EvaluationError, HyperflowError
from hyperflow.lang.parser import parse_value
from hyperflow.lang.space import Space
from hyperflow.models.dist import Dist, point
from hyperflow.models.hyper import InitState
from hyperflow.services.semantics import validate_state

logger = logging.getLogger(__name__)


def state_literal(text: str, space: Space, visible: bool) -> Tuple[Any, ...]:
    """Parse a visible or hidden state written as a literal."""
    decls = space.visible if visible else space.hidden
    value = parse_value(text, space)
    if not isinstance(value, tuple) or (len(decls) == 1 and len(value) != 1):
        value = (value,)
    which = "visible" if visible else "hidden"
    if len(value) != len(decls):
        raise EvaluationError(f"{which} state '{text}' has {len(value)} components, expected {len(decls)}")
    for decl, x in zip(decls, value):
        if x not in decl.domain:
            raise EvaluationError(f"{which} state '{text}': {x!r} is outside the domain of '{decl.name}'")
    return value


def prior_from_mapping(mapping: Mapping[str, Any], space: Space) -> Dist:
    """A prior from literal keys and rational-string weights; must have weight 1."""
    pairs = []
    for key, weight in mapping.items():
        try:
            p = Fraction(str(weight))
        except (ValueError, ZeroDivisionError):
            raise HyperflowError(f"prior weight {weight!r} for '{key}' is not a rational") from None
        pairs.append((state_literal(key, space, visible=False), p))
    prior = Dist(pairs)
    if not prior.is_full:
        raise HyperflowError(f"prior has weight {prior.weight}, expected 1")
    return prior


def resolve_prior(spec: str, space: Space) -> Dist:
    """``uniform``, ``point=...``, a JSON object, or a path to a JSON prior file."""
    spec = spec.strip()
    if spec == "uniform":
        return space.uniform_inner()
    if spec.startswith("point="):
        return point(state_literal(spec[len("point="):], space, visible=False))
    if spec.startswith(("{", "[")):
        text = spec
    else:
        path = Path(spec)
        if not path.is_file():
            raise HyperflowError(f"prior '{spec}' is neither uniform, point=..., nor a readable file")
        text = path.read_text(encoding="utf-8")
    try:
        mapping = json.loads(text)
    except json.JSONDecodeError as e:
        raise HyperflowError(f"prior is not valid JSON: {e}") from None
    if not isinstance(mapping, dict):
        raise HyperflowError("prior JSON must be an object from hidden states to rationals")
    return prior_from_mapping(mapping, space)


def initial_state(space: Space, prior: str = "uniform", visible: Optional[str] = None) -> InitState:
    """The initial state a single run starts from; visible defaults to each domain's first value."""
    if visible is None:
        v = tuple(d.domain.values[0] for d in space.visible)
    else:
        v = state_literal(visible, space, visible=True)
    state = InitState(v, resolve_prior(prior, space))
    validate_state(space, state)
    logger.debug("initial state: visible %r, prior over %d hidden states", v, len(state.inner))
    return state
