"""HTTP client for the document store."""

from __future__ import annotations

from urllib.parse import quote

import httpx

from ..errors import DocStoreError, DocumentNotFound


class DocStoreClient:
    def __init__(self, base_url: str, timeout: float = 30.0):
        self._http = httpx.Client(base_url=base_url.rstrip("/"), timeout=timeout)

    def close(self) -> None:
        self._http.close()

    def put_doc(self, payload: dict) -> None:
        doc_id = payload.get("id")
        if not isinstance(doc_id, str) or not doc_id:
            raise DocStoreError("payload must carry a string 'id'")
        resp = self._request("PUT", f"/v1/docs/{quote(doc_id, safe='')}", json=payload)
        if resp.status_code != 200:
            raise DocStoreError(f"put_doc failed: {_detail(resp)}")

    def get_doc(self, external_doc_id: str) -> dict:
        resp = self._request("GET", f"/v1/docs/{quote(external_doc_id, safe='')}")
        if resp.status_code == 404:
            raise DocumentNotFound(f"no such document: {external_doc_id!r}")
        if resp.status_code != 200:
            raise DocStoreError(f"get_doc failed: {_detail(resp)}")
        return resp.json()

    def batch_get(self, ids: list[str]) -> tuple[dict[str, dict], list[str]]:
        resp = self._request("POST", "/v1/docs:batchGet", json={"ids": ids})
        if resp.status_code != 200:
            raise DocStoreError(f"batch_get failed: {_detail(resp)}")
        doc = resp.json()
        return doc["found"], doc["missing"]

    def count(self) -> int:
        resp = self._request("GET", "/v1/_count")
        if resp.status_code != 200:
            raise DocStoreError(f"count failed: {_detail(resp)}")
        return int(resp.json()["count"])

    def _request(self, method: str, url: str, **kwargs) -> httpx.Response:
        # transport failures raise DocStoreError; a 404 is NOT a transport
        # failure and is mapped to DocumentNotFound by the callers above
        try:
            return self._http.request(method, url, **kwargs)
        except httpx.HTTPError as e:
            raise DocStoreError(f"doc store unreachable: {e}") from e


def _detail(resp: httpx.Response) -> str:
    try:
        return resp.json().get("error", resp.text)
    except ValueError:
        return resp.text
