"""REST front door.

  GET  /v1/search?q=...&k=10    ranked results with hydrated payloads
  GET  /v1/doc/{docid}          raw document payload
  POST /v1/admin/swap           atomic generation switch (202/409)
  GET  /v1/admin/status         generations and pool state
  GET  /v1/metrics              instances, billing, latency, qps

Error discipline: client mistakes are 400s, overload is 503, incomplete
swap targets are 409, everything unexpected is a 500 carrying an opaque
id that also appears in the server log. Admin routes check a bearer
token only when one was configured.
"""

from __future__ import annotations

import logging
import uuid

from fastapi import Depends, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import (
    DocumentNotFound,
    FanoutError,
    GenerationError,
    PoolOverloadError,
)
from .models import (
    MetricsResponse,
    SearchResponse,
    StatusResponse,
    SwapRequest,
    SwapResponse,
)
from .service import SearchService

logger = logging.getLogger("anlessini.gateway")

MAX_K = 100
DEFAULT_K = 10


class _BadRequest(Exception):
    pass


class _Unauthorized(Exception):
    pass


def make_app(
    service: SearchService,
    admin_token: str | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="anlessini-gateway", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_admin(request: Request) -> None:
        if admin_token is None:
            return
        if request.headers.get("authorization") != f"Bearer {admin_token}":
            raise _Unauthorized("missing or wrong admin token")

    @app.exception_handler(_BadRequest)
    async def _bad_request(_req: Request, exc: _BadRequest) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(_Unauthorized)
    async def _unauthorized(_req: Request, exc: _Unauthorized) -> JSONResponse:
        return JSONResponse(status_code=401, content={"error": str(exc)})

    @app.exception_handler(DocumentNotFound)
    async def _not_found(_req: Request, exc: DocumentNotFound) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(PoolOverloadError)
    async def _overload(_req: Request, exc: PoolOverloadError) -> JSONResponse:
        return JSONResponse(status_code=503, content={"error": str(exc)})

    @app.exception_handler(GenerationError)
    async def _bad_generation(_req: Request, exc: GenerationError) -> JSONResponse:
        return JSONResponse(
            status_code=409, content={"error": str(exc), "missing": exc.missing}
        )

    @app.exception_handler(FanoutError)
    async def _fanout_failed(_req: Request, exc: FanoutError) -> JSONResponse:
        if isinstance(exc.__cause__, PoolOverloadError):
            return JSONResponse(status_code=503, content={"error": str(exc)})
        return _opaque_500(exc)

    @app.exception_handler(Exception)
    async def _internal(_req: Request, exc: Exception) -> JSONResponse:
        return _opaque_500(exc)

    def _opaque_500(exc: BaseException) -> JSONResponse:
        error_id = uuid.uuid4().hex[:12]
        logger.exception("internal error %s: %s", error_id, exc)
        return JSONResponse(
            status_code=500, content={"error": "internal error", "id": error_id}
        )

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True}

    @app.get("/v1/search", response_model=SearchResponse)
    def search(
        q: str = Query(default=""),
        k: str = Query(default=str(DEFAULT_K)),
    ) -> SearchResponse:
        query = q.strip()
        if not query:
            raise _BadRequest("q must be a nonempty query string")
        try:
            limit = int(k)
        except ValueError:
            raise _BadRequest(f"k must be an integer, got {k!r}") from None
        if not 1 <= limit <= MAX_K:
            raise _BadRequest(f"k must be between 1 and {MAX_K}, got {limit}")
        return service.search(query, limit)

    @app.get("/v1/doc/{docid:path}")
    def get_doc(docid: str) -> dict:
        # starlette delivers the path percent-decoded
        if not docid:
            raise _BadRequest("docid must be nonempty")
        return service.get_doc(docid)

    @app.post("/v1/admin/swap", response_model=SwapResponse, status_code=202)
    def swap(req: SwapRequest, _: None = Depends(require_admin)) -> SwapResponse:
        return service.swap(req.generation_id)

    @app.get(
        "/v1/admin/status",
        response_model=StatusResponse,
        dependencies=[Depends(require_admin)],
    )
    def status() -> StatusResponse:
        return service.status()

    @app.get("/v1/metrics", response_model=MetricsResponse)
    def metrics() -> MetricsResponse:
        return service.metrics()

    return app
