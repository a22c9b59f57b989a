"""File-backed blob store with per-key serving statistics.

Layout under the data root: one directory per bucket, inside it the key's
path components as directories with the final component suffixed ``.obj``
(bytes) and ``.meta`` (JSON sidecar). The suffix keeps ``a`` and ``a/b``
from colliding as file vs directory. Writes go to a temp file in the
target directory followed by an atomic rename, so readers never observe
a torn object.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
import time
import zlib
from dataclasses import dataclass
from pathlib import Path

from ..errors import InvalidKey, InvalidRange, ObjectNotFound

_BUCKET_RE = re.compile(r"^[a-z0-9-]{1,63}$")

OBJ_SUFFIX = ".obj"
META_SUFFIX = ".meta"


@dataclass(frozen=True)
class ObjectMeta:
    bucket: str
    key: str
    size: int
    crc32: int
    last_modified: float


def validate_bucket(bucket: str) -> None:
    if not _BUCKET_RE.match(bucket):
        raise InvalidKey(f"invalid bucket name: {bucket!r}")


def validate_key(key: str) -> None:
    if not key or len(key.encode("utf-8")) > 1024:
        raise InvalidKey(f"invalid key length: {key!r}")
    if key.startswith("/"):
        raise InvalidKey(f"key must not start with '/': {key!r}")
    for part in key.split("/"):
        if part == "":
            raise InvalidKey(f"empty path component in key: {key!r}")
        if part in (".", ".."):
            raise InvalidKey(f"'.' and '..' not allowed in key: {key!r}")
        if "\x00" in part or "\\" in part:
            raise InvalidKey(f"illegal character in key: {key!r}")


class BlobStore:
    """Durable object storage rooted at ``data_root``.

    Thread-safe. Serving statistics (bytes served per key, request count)
    are process-local instrumentation and reset on restart; the objects
    themselves are persistent.
    """

    def __init__(self, data_root: str | Path):
        self._root = Path(data_root)
        self._root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._bytes_served: dict[str, int] = {}
        self._request_count = 0

    def _object_path(self, bucket: str, key: str) -> Path:
        validate_bucket(bucket)
        validate_key(key)
        parts = key.split("/")
        return self._root.joinpath(bucket, *parts[:-1], parts[-1] + OBJ_SUFFIX)

    def _count_request(self) -> None:
        with self._lock:
            self._request_count += 1

    def _count_served(self, bucket: str, key: str, n: int) -> None:
        stat_key = f"{bucket}/{key}"
        with self._lock:
            self._bytes_served[stat_key] = self._bytes_served.get(stat_key, 0) + n

    def put(self, bucket: str, key: str, data: bytes) -> ObjectMeta:
        self._count_request()
        path = self._object_path(bucket, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        meta = ObjectMeta(
            bucket=bucket,
            key=key,
            size=len(data),
            crc32=zlib.crc32(data),
            last_modified=time.time(),
        )
        _atomic_write(path, data)
        sidecar = json.dumps(
            {"size": meta.size, "crc32": meta.crc32, "last_modified": meta.last_modified}
        ).encode("utf-8")
        _atomic_write(path.with_suffix(META_SUFFIX), sidecar)
        return meta

    def get(self, bucket: str, key: str, byte_range: tuple[int, int] | None = None) -> bytes:
        """Full object bytes, or the inclusive slice [start..end]."""
        self._count_request()
        path = self._object_path(bucket, key)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise ObjectNotFound(f"no such object: {bucket}/{key}") from None
        if byte_range is None:
            self._count_served(bucket, key, len(data))
            return data
        start, end = byte_range
        if start < 0 or end < start or end >= len(data):
            raise InvalidRange(
                f"range {start}-{end} invalid for object of size {len(data)}"
            )
        chunk = data[start : end + 1]
        self._count_served(bucket, key, len(chunk))
        return chunk

    def head(self, bucket: str, key: str) -> ObjectMeta:
        self._count_request()
        path = self._object_path(bucket, key)
        meta = self._read_sidecar(bucket, key, path)
        if meta is None:
            raise ObjectNotFound(f"no such object: {bucket}/{key}")
        return meta

    def object_size(self, bucket: str, key: str) -> int:
        """Size lookup that does not count as a client request."""
        path = self._object_path(bucket, key)
        try:
            return path.stat().st_size
        except FileNotFoundError:
            raise ObjectNotFound(f"no such object: {bucket}/{key}") from None

    def list(self, bucket: str, prefix: str = "") -> list[ObjectMeta]:
        """All objects in ``bucket`` whose key starts with ``prefix``, key-sorted."""
        self._count_request()
        validate_bucket(bucket)
        bucket_dir = self._root / bucket
        if not bucket_dir.is_dir():
            raise ObjectNotFound(f"no such bucket: {bucket}")
        out: list[ObjectMeta] = []
        for path in bucket_dir.rglob("*" + OBJ_SUFFIX):
            rel = path.relative_to(bucket_dir)
            key = "/".join(rel.parts)[: -len(OBJ_SUFFIX)]
            if not key.startswith(prefix):
                continue
            meta = self._read_sidecar(bucket, key, path)
            if meta is not None:
                out.append(meta)
        out.sort(key=lambda m: m.key)
        return out

    def stats(self) -> dict:
        with self._lock:
            return {
                "per_key_bytes_served": dict(self._bytes_served),
                "request_count": self._request_count,
            }

    def _read_sidecar(self, bucket: str, key: str, obj_path: Path) -> ObjectMeta | None:
        try:
            doc = json.loads(obj_path.with_suffix(META_SUFFIX).read_bytes())
        except FileNotFoundError:
            # sidecar lost (e.g. crash between renames): fall back to the file
            try:
                st = obj_path.stat()
            except FileNotFoundError:
                return None
            return ObjectMeta(bucket, key, st.st_size, zlib.crc32(obj_path.read_bytes()), st.st_mtime)
        return ObjectMeta(
            bucket, key, int(doc["size"]), int(doc["crc32"]), float(doc["last_modified"])
        )


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        os.write(fd, data)
        os.fsync(fd)
    finally:
        os.close(fd)
    os.replace(tmp, path)
