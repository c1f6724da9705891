"""Main FastAPI application."""

from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse

from hyperflow.api.v1.router import api_router
from hyperflow.core.config import settings
from hyperflow.core.errors import HyperflowError

app = FastAPI(
    title="hyperflow API",
    description="Evaluate, measure and compare programs under hyperdistribution semantics",
    version="0.1.0",
    openapi_url=f"{settings.api_prefix}/openapi.json",
)

app.include_router(api_router, prefix=settings.api_prefix)


@app.exception_handler(HyperflowError)
async def hyperflow_error_handler(request: Request, exc: HyperflowError) -> JSONResponse:
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content={"detail": str(exc)})


@app.get("/")
async def root():
    """Root endpoint."""
    return {
        "message": "hyperflow API",
        "version": "0.1.0",
        "docs_url": "/docs",
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "service": "hyperflow",
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "hyperflow.main:app",
        host=settings.api_host,
        port=settings.api_port,
    )
