"""Append-only document log with an in-memory offset table.

One JSON record per line. The table (external id -> byte offset and
length of its latest record) is rebuilt by scanning the log at startup,
so the file is the only durable state. Writes are serialized through a
single appender lock and flushed before the table is updated; readers
therefore only ever see complete records. Last writer wins per id.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from ..errors import DocStoreError, DocumentNotFound


class DocLog:
    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._offsets: dict[str, tuple[int, int]] = {}
        self._valid_end = 0
        if self._path.exists():
            self._rebuild()
        self._append_fd = os.open(self._path, os.O_WRONLY | os.O_CREAT)
        os.lseek(self._append_fd, self._valid_end, os.SEEK_SET)
        # drop a torn trailing record left by a crash mid-append
        os.truncate(self._append_fd, self._valid_end)
        self._read_fd = os.open(self._path, os.O_RDONLY)

    def _rebuild(self) -> None:
        offset = 0
        with open(self._path, "rb") as f:
            for line in f:
                if not line.endswith(b"\n"):
                    break  # incomplete tail; ignored and truncated on open
                try:
                    record = json.loads(line)
                    doc_id = record["id"]
                except (ValueError, KeyError, TypeError) as e:
                    raise DocStoreError(
                        f"corrupt document log at byte {offset}: {e}"
                    ) from e
                self._offsets[doc_id] = (offset, len(line))
                offset += len(line)
        self._valid_end = offset

    def close(self) -> None:
        os.close(self._append_fd)
        os.close(self._read_fd)

    def __len__(self) -> int:
        with self._lock:
            return len(self._offsets)

    def put(self, external_doc_id: str, payload: dict) -> None:
        """Store ``payload`` under ``external_doc_id``; payload["id"] must match."""
        if not isinstance(payload, dict):
            raise DocStoreError("payload must be a JSON object")
        if payload.get("id") != external_doc_id:
            raise DocStoreError(
                f"payload.id {payload.get('id')!r} does not match document id {external_doc_id!r}"
            )
        line = (
            json.dumps({"id": external_doc_id, "payload": payload}, ensure_ascii=False)
            + "\n"
        ).encode("utf-8")
        with self._lock:
            offset = self._valid_end
            os.write(self._append_fd, line)
            os.fsync(self._append_fd)
            self._valid_end = offset + len(line)
            self._offsets[external_doc_id] = (offset, len(line))

    def get(self, external_doc_id: str) -> dict:
        with self._lock:
            loc = self._offsets.get(external_doc_id)
        if loc is None:
            raise DocumentNotFound(f"no such document: {external_doc_id!r}")
        offset, length = loc
        data = os.pread(self._read_fd, length, offset)
        return json.loads(data)["payload"]

    def batch_get(self, ids: list[str]) -> tuple[dict[str, dict], list[str]]:
        """Partition ``ids`` into found payloads and missing ids (deduplicated)."""
        if not ids:
            raise DocStoreError("batch_get requires at least one id")
        if len(ids) > 100:
            raise DocStoreError(f"batch_get limited to 100 ids, got {len(ids)}")
        found: dict[str, dict] = {}
        missing: list[str] = []
        seen: set[str] = set()
        for doc_id in ids:
            if doc_id in seen:
                continue
            seen.add(doc_id)
            try:
                found[doc_id] = self.get(doc_id)
            except DocumentNotFound:
                missing.append(doc_id)
        return found, missing

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._offsets)
