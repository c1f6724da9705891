"""Law catalog endpoints."""

from typing import Any, List

from fastapi import APIRouter, Query

from hyperflow.api.deps import get_service, run_service
from hyperflow.schemas.requests import LawsRequest
from hyperflow.schemas.results import CatalogReportSchema
from hyperflow.services.lawcheck import load_catalog

router = APIRouter()


@router.get("/", response_model=CatalogReportSchema)
async def run_laws(only: List[str] = Query(default=[])) -> Any:
    """Check the bundled catalog, or just the laws tagged in ``only``."""
    service = get_service(only=only)
    report, _ = await run_service(service.laws)
    return report


@router.post("/", response_model=CatalogReportSchema)
async def run_laws_with(request: LawsRequest) -> Any:
    """Check the catalog with replaced spaces or a different prior suite."""
    service = get_service(
        only=request.only, spaces=request.spaces, seed=request.seed, random_priors=request.random_priors
    )
    report, _ = await run_service(service.laws)
    return report


@router.get("/tags")
async def list_law_tags() -> Any:
    return [{"tag": law.tag, "name": law.name, "relation": law.relation} for law in load_catalog().laws]
