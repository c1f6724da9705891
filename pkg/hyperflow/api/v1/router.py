"""API v1 router."""

from fastapi import APIRouter

from hyperflow.api.v1.endpoints import laws, programs

api_router = APIRouter()

api_router.include_router(programs.router, prefix="/programs", tags=["programs"])
api_router.include_router(laws.router, prefix="/laws", tags=["laws"])
