"""Program evaluation and comparison endpoints."""

from typing import Any

from fastapi import APIRouter

from hyperflow.api.deps import get_service, run_service
from hyperflow.schemas.requests import CompareRequest, EntropyRequest, LoopRequest, ProgramRequest
from hyperflow.schemas.results import HyperSchema, LeakReportSchema, LoopReportSchema, VerdictSchema

router = APIRouter()


def _program_overrides(request: ProgramRequest) -> dict:
    return dict(
        prior=request.prior,
        visible=request.visible,
        implicit_uniform_locals=request.implicit_uniform_locals,
        loop_strategy=request.loop_strategy,
        loop_tol=request.tol,
        loop_max_k=request.max_k,
    )


@router.post("/eval", response_model=HyperSchema)
async def eval_program(request: ProgramRequest) -> Any:
    """Output hyper of a program from one initial state."""
    service = get_service(**_program_overrides(request))
    return await run_service(service.eval, request.program)


@router.post("/compare", response_model=VerdictSchema)
async def compare_programs(request: CompareRequest) -> Any:
    """Check a relation between two programs over the prior suite.

    A failing relation is still a successful request; ``holds`` carries the answer.
    """
    service = get_service(
        relation=request.relation,
        seed=request.seed,
        random_priors=request.random_priors,
        explain=request.explain,
        implicit_uniform_locals=request.implicit_uniform_locals,
    )
    verdict, _ = await run_service(service.compare, request.spec, request.impl)
    return verdict


@router.post("/entropy", response_model=LeakReportSchema)
async def program_entropy(request: EntropyRequest) -> Any:
    service = get_service(bits=request.bits, **_program_overrides(request))
    return await run_service(service.entropy, request.program)


@router.post("/loop", response_model=LoopReportSchema)
async def program_loop(request: LoopRequest) -> Any:
    """Convergence report of a program that is a single while loop."""
    service = get_service(**_program_overrides(request))
    return await run_service(service.loop, request.program)
