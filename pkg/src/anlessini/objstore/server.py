"""HTTP wire protocol v1 for the blob store.

Routes:
  PUT  /v1/{bucket}/{key}            -> 200 {"size", "crc32"}
  GET  /v1/{bucket}/{key}            -> 200 raw bytes (206 with a Range header)
  GET  /v1/{bucket}?prefix=p         -> 200 {"objects": [...]}
  GET  /v1/_stats                    -> 200 {"per_key_bytes_served", "request_count"}

Range headers are ``bytes=a-b`` with both ends inclusive and required.
"""

from __future__ import annotations

import re

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ..errors import InvalidKey, InvalidRange, ObjectNotFound
from .storage import BlobStore

_RANGE_RE = re.compile(r"^bytes=(\d+)-(\d+)$")


def make_app(store: BlobStore) -> FastAPI:
    app = FastAPI(title="anlessini-object-store", docs_url=None, redoc_url=None)

    @app.exception_handler(ObjectNotFound)
    async def _not_found(_req: Request, exc: ObjectNotFound) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(InvalidKey)
    async def _bad_key(_req: Request, exc: InvalidKey) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(InvalidRange)
    async def _bad_range(_req: Request, exc: InvalidRange) -> JSONResponse:
        return JSONResponse(status_code=416, content={"error": str(exc)})

    # registered before /v1/{bucket} so "_stats" is never parsed as a bucket
    @app.get("/v1/_stats")
    def stats() -> dict:
        return store.stats()

    @app.put("/v1/{bucket}/{key:path}")
    async def put_object(bucket: str, key: str, request: Request) -> dict:
        data = await request.body()
        meta = store.put(bucket, key, data)
        return {"size": meta.size, "crc32": meta.crc32}

    @app.get("/v1/{bucket}/{key:path}")
    def get_object(bucket: str, key: str, request: Request) -> Response:
        range_header = request.headers.get("range")
        if range_header is None:
            data = store.get(bucket, key)
            return Response(content=data, media_type="application/octet-stream")
        m = _RANGE_RE.match(range_header)
        if m is None:
            raise InvalidRange(f"unsupported Range header: {range_header!r}")
        start, end = int(m.group(1)), int(m.group(2))
        data = store.get(bucket, key, (start, end))
        size = store.object_size(bucket, key)
        return Response(
            content=data,
            status_code=206,
            media_type="application/octet-stream",
            headers={"Content-Range": f"bytes {start}-{end}/{size}"},
        )

    @app.get("/v1/{bucket}")
    def list_objects(bucket: str, prefix: str = "") -> dict:
        objects = store.list(bucket, prefix)
        return {
            "objects": [
                {
                    "key": m.key,
                    "size": m.size,
                    "crc32": m.crc32,
                    "last_modified": m.last_modified,
                }
                for m in objects
            ]
        }

    return app
