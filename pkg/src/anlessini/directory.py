"""Byte-level read abstraction over index files.

``Directory`` decouples query evaluation from where index bytes live:
local disk, a remote object store, or an in-memory cache. All backends
are read-only and immutable after construction, so any number of readers
may share them.
"""

from __future__ import annotations

import os
from abc import ABC, abstractmethod
from pathlib import Path

from .errors import DirectoryError


class IndexInput(ABC):
    """Positioned reader over one file: seek to a byte offset, read n bytes.

    Reads past the end are errors, never silent truncation.
    """

    def __init__(self, name: str, length: int):
        self.name = name
        self.length = length
        self.position = 0

    def seek(self, position: int) -> None:
        if not 0 <= position <= self.length:
            raise DirectoryError(
                f"seek to {position} outside [0, {self.length}] in {self.name}",
                file_name=self.name,
            )
        self.position = position

    def read(self, n: int) -> bytes:
        """Read exactly ``n`` bytes from the current position."""
        if n < 0:
            raise DirectoryError(f"negative read length {n}", file_name=self.name)
        if self.position + n > self.length:
            raise DirectoryError(
                f"read of {n} bytes at {self.position} past end of "
                f"{self.name} (length {self.length})",
                file_name=self.name,
            )
        data = self._read_at(self.position, n)
        if len(data) != n:
            raise DirectoryError(
                f"short read from {self.name}: wanted {n}, got {len(data)}",
                file_name=self.name,
            )
        self.position += n
        return data

    def read_all(self) -> bytes:
        """Read the whole file regardless of current position."""
        self.seek(0)
        return self.read(self.length)

    @abstractmethod
    def _read_at(self, position: int, n: int) -> bytes: ...

    def close(self) -> None:
        pass


class Directory(ABC):
    """Read-only file namespace: list files, get lengths, open inputs."""

    @abstractmethod
    def list_files(self) -> list[str]: ...

    @abstractmethod
    def file_length(self, name: str) -> int: ...

    @abstractmethod
    def open_input(self, name: str) -> IndexInput: ...

    def read_file(self, name: str) -> bytes:
        """Fetch a file's full contents. Backends may override with a
        cheaper whole-file path (e.g. an unranged GET)."""
        inp = self.open_input(name)
        try:
            return inp.read_all()
        finally:
            inp.close()


class BytesIndexInput(IndexInput):
    """IndexInput over an in-memory bytes object."""

    def __init__(self, name: str, data: bytes):
        super().__init__(name, len(data))
        self._data = data

    def _read_at(self, position: int, n: int) -> bytes:
        return self._data[position : position + n]


class _FileIndexInput(IndexInput):
    def __init__(self, name: str, path: Path):
        self._fd = os.open(path, os.O_RDONLY)
        super().__init__(name, os.fstat(self._fd).st_size)

    def _read_at(self, position: int, n: int) -> bytes:
        # pread keeps concurrent inputs over one fd-less file independent
        return os.pread(self._fd, n, position)

    def close(self) -> None:
        if self._fd >= 0:
            os.close(self._fd)
            self._fd = -1

    def __del__(self):
        self.close()


class LocalDirectory(Directory):
    """Directory over a local filesystem path (flat, non-recursive)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        if not self.path.is_dir():
            raise DirectoryError(f"not a directory: {self.path}")

    def list_files(self) -> list[str]:
        return sorted(p.name for p in self.path.iterdir() if p.is_file())

    def file_length(self, name: str) -> int:
        target = self._resolve(name)
        return target.stat().st_size

    def open_input(self, name: str) -> IndexInput:
        return _FileIndexInput(name, self._resolve(name))

    def _resolve(self, name: str) -> Path:
        target = self.path / name
        if os.sep in name or not target.is_file():
            raise DirectoryError(f"no such file: {name}", file_name=name)
        return target


class CachingDirectory(Directory):
    """Eagerly loads every file of ``inner`` into memory at construction.

    This is the cold-start cache population: after construction all reads
    are served from memory and never touch ``inner`` again, so the fetch
    counters are frozen once ``__init__`` returns.
    """

    def __init__(self, inner: Directory):
        self.bytes_fetched_from_inner = 0
        self.inner_read_count = 0
        self._files: dict[str, bytes] = {}
        names = inner.list_files()
        if not names:
            raise DirectoryError("cannot cache an empty directory")
        for name in names:
            data = inner.read_file(name)
            self._files[name] = data
            self.bytes_fetched_from_inner += len(data)
            self.inner_read_count += 1

    def list_files(self) -> list[str]:
        return sorted(self._files)

    def file_length(self, name: str) -> int:
        return len(self._lookup(name))

    def open_input(self, name: str) -> IndexInput:
        return BytesIndexInput(name, self._lookup(name))

    def read_file(self, name: str) -> bytes:
        return self._lookup(name)

    def _lookup(self, name: str) -> bytes:
        try:
            return self._files[name]
        except KeyError:
            raise DirectoryError(f"no such file: {name}", file_name=name) from None
