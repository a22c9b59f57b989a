"""HTTP front for the document store.

  PUT  /v1/docs/{id}        body=payload JSON -> 200
  GET  /v1/docs/{id}        -> 200 payload / 404
  POST /v1/docs:batchGet    body={"ids": [...]} -> 200 {"found", "missing"}
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import DocStoreError, DocumentNotFound
from .storage import DocLog


class BatchGetRequest(BaseModel):
    ids: list[str] = Field(min_length=1, max_length=100)


def make_app(log: DocLog) -> FastAPI:
    app = FastAPI(title="anlessini-doc-store", docs_url=None, redoc_url=None)

    @app.exception_handler(DocumentNotFound)
    async def _not_found(_req: Request, exc: DocumentNotFound) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(DocStoreError)
    async def _bad_request(_req: Request, exc: DocStoreError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/v1/docs:batchGet")
    def batch_get(req: BatchGetRequest) -> dict:
        found, missing = log.batch_get(req.ids)
        return {"found": found, "missing": missing}

    @app.put("/v1/docs/{doc_id:path}")
    async def put_doc(doc_id: str, request: Request) -> dict:
        payload = await request.json()
        log.put(doc_id, payload)
        return {"ok": True, "id": doc_id}

    @app.get("/v1/docs/{doc_id:path}")
    def get_doc(doc_id: str) -> dict:
        return log.get(doc_id)

    @app.get("/v1/_count")
    def count() -> dict:
        return {"count": len(log)}

    return app
