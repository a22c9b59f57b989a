"""HTTP client for the blob store, plus the store-backed Directory.

``RemoteDirectory`` is the piece that lets a segment reader pull index
bytes straight off the store: file listings come from the list endpoint
(snapshotted at construction, since segments are immutable) and byte
reads become ranged GETs. Composed under ``CachingDirectory`` it gives
the cold-start path: every file fetched whole, once.
"""

from __future__ import annotations

from urllib.parse import quote

import httpx

from ..directory import Directory, IndexInput
from ..errors import (
    DirectoryError,
    InvalidKey,
    InvalidRange,
    ObjectNotFound,
    ObjectStoreError,
)
from .storage import ObjectMeta, validate_bucket, validate_key


class ObjectStoreClient:
    def __init__(self, base_url: str, timeout: float = 30.0):
        self._http = httpx.Client(base_url=base_url.rstrip("/"), timeout=timeout)

    def close(self) -> None:
        self._http.close()

    def _object_url(self, bucket: str, key: str) -> str:
        # validated here as well: URL normalization would otherwise fold
        # "a/../b" into "b" before the server ever saw it
        validate_bucket(bucket)
        validate_key(key)
        return f"/v1/{bucket}/{quote(key, safe='/')}"

    def put(self, bucket: str, key: str, data: bytes) -> ObjectMeta:
        resp = self._request("PUT", self._object_url(bucket, key), content=data)
        doc = resp.json()
        return ObjectMeta(bucket, key, int(doc["size"]), int(doc["crc32"]), 0.0)

    def get(
        self, bucket: str, key: str, byte_range: tuple[int, int] | None = None
    ) -> bytes:
        headers = {}
        if byte_range is not None:
            headers["Range"] = f"bytes={byte_range[0]}-{byte_range[1]}"
        resp = self._request("GET", self._object_url(bucket, key), headers=headers)
        return resp.content

    def list(self, bucket: str, prefix: str = "") -> list[ObjectMeta]:
        resp = self._request("GET", f"/v1/{bucket}", params={"prefix": prefix})
        return [
            ObjectMeta(
                bucket=bucket,
                key=o["key"],
                size=int(o["size"]),
                crc32=int(o["crc32"]),
                last_modified=float(o["last_modified"]),
            )
            for o in resp.json()["objects"]
        ]

    def stats(self) -> dict:
        return self._request("GET", "/v1/_stats").json()

    def _request(self, method: str, url: str, **kwargs) -> httpx.Response:
        try:
            resp = self._http.request(method, url, **kwargs)
        except httpx.HTTPError as e:
            raise ObjectStoreError(f"object store unreachable: {e}") from e
        if resp.status_code in (200, 206):
            return resp
        detail = _error_detail(resp)
        if resp.status_code == 404:
            raise ObjectNotFound(detail)
        if resp.status_code == 416:
            raise InvalidRange(detail)
        if resp.status_code == 400:
            raise InvalidKey(detail)
        raise ObjectStoreError(f"object store returned {resp.status_code}: {detail}")


def _error_detail(resp: httpx.Response) -> str:
    try:
        return resp.json().get("error", resp.text)
    except ValueError:
        return resp.text


class RemoteDirectory(Directory):
    """Directory over ``{bucket}/{prefix}`` in an object store.

    The listing is snapshotted at construction: a segment's files never
    change once written, so the snapshot stays valid for the lifetime of
    the generation it belongs to.
    """

    def __init__(self, client: ObjectStoreClient, bucket: str, prefix: str):
        if prefix and not prefix.endswith("/"):
            prefix += "/"
        self._client = client
        self._bucket = bucket
        self._prefix = prefix
        try:
            listing = client.list(bucket, prefix)
        except ObjectNotFound:
            listing = []
        except ObjectStoreError as e:
            raise DirectoryError(f"cannot list {bucket}/{prefix}: {e}") from e
        self._sizes: dict[str, int] = {}
        for meta in listing:
            name = meta.key[len(prefix):]
            if "/" in name or not name:
                continue  # nested entries are not part of this segment
            self._sizes[name] = meta.size

    def list_files(self) -> list[str]:
        return sorted(self._sizes)

    def file_length(self, name: str) -> int:
        try:
            return self._sizes[name]
        except KeyError:
            raise DirectoryError(f"no such file: {name}", file_name=name) from None

    def open_input(self, name: str) -> IndexInput:
        return _RemoteIndexInput(self, name, self.file_length(name))

    def read_file(self, name: str) -> bytes:
        # cold-start path: one unranged GET for the whole object
        self.file_length(name)
        try:
            return self._client.get(self._bucket, self._prefix + name)
        except ObjectNotFound:
            raise DirectoryError(f"no such file: {name}", file_name=name) from None
        except ObjectStoreError as e:
            raise DirectoryError(f"read failed for {name}: {e}", file_name=name) from e

    def _read_range(self, name: str, start: int, end: int) -> bytes:
        try:
            return self._client.get(self._bucket, self._prefix + name, (start, end))
        except (ObjectNotFound, InvalidRange, ObjectStoreError) as e:
            raise DirectoryError(f"read failed for {name}: {e}", file_name=name) from e


class _RemoteIndexInput(IndexInput):
    def __init__(self, directory: RemoteDirectory, name: str, length: int):
        super().__init__(name, length)
        self._directory = directory

    def _read_at(self, position: int, n: int) -> bytes:
        if n == 0:
            return b""
        return self._directory._read_range(self.name, position, position + n - 1)
