"""Request-scoped helpers shared by the endpoints."""

from typing import Any, Callable, TypeVar

from fastapi import HTTPException, status
from fastapi.concurrency import run_in_threadpool

from hyperflow.core.config import RunConfig
from hyperflow.services.programs import ProgramService

T = TypeVar("T")


def get_service(**overrides: Any) -> ProgramService:
    """A service configured from settings plus the request's overrides."""
    try:
        return ProgramService(RunConfig.build(**overrides))
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))


async def run_service(call: Callable[..., T], *args: Any) -> T:
    """Run a blocking service call off the event loop; library errors become 400s."""
    try:
        return await run_in_threadpool(call, *args)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
