"""A single function instance: one cached segment, one reader.

Provisioning is the cold start: every segment file is pulled through the
directory (eagerly, whole files) into memory, the reader opens over the
cache, and the instance reports how long that took and how many bytes it
fetched. After that the instance never touches the backing store again;
``bytes_fetched`` is frozen.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

from ..directory import CachingDirectory, Directory
from ..errors import AnlessiniError, ProvisioningError
from ..scoring import ScoredDoc
from ..segment import SegmentReader


class InstanceState(str, enum.Enum):
    PROVISIONING = "PROVISIONING"
    WARM = "WARM"
    BUSY = "BUSY"
    RETIRED = "RETIRED"


@dataclass
class QueryResult:
    hits: list[ScoredDoc]
    generation_id: str


@dataclass
class FunctionInstance:
    instance_id: str
    generation_id: str
    state: InstanceState = InstanceState.PROVISIONING
    cold_start_ms: float = 0.0
    bytes_fetched: int = 0
    invocation_count: int = 0
    last_used: float = field(default=0.0, repr=False)
    _reader: SegmentReader | None = field(default=None, repr=False)

    @classmethod
    def provision(
        cls, instance_id: str, generation_id: str, directory: Directory
    ) -> FunctionInstance:
        """Cold-start an instance over ``directory`` (the uncached backend)."""
        inst = cls(instance_id=instance_id, generation_id=generation_id)
        started = time.perf_counter()
        try:
            names = directory.list_files()
            if "manifest.json" not in names:
                raise ProvisioningError(
                    f"cannot provision {instance_id}: manifest.json not found "
                    f"for generation {generation_id!r}"
                )
            cache = CachingDirectory(directory)
            inst._reader = SegmentReader(cache)
        except ProvisioningError:
            raise
        except AnlessiniError as e:
            raise ProvisioningError(f"cannot provision {instance_id}: {e}") from e
        inst.bytes_fetched = cache.bytes_fetched_from_inner
        inst.cold_start_ms = (time.perf_counter() - started) * 1000.0
        inst.state = InstanceState.WARM
        inst.last_used = time.monotonic()
        return inst

    def execute(self, query: str, k: int) -> QueryResult:
        if self._reader is None:
            raise ProvisioningError(f"instance {self.instance_id} has no reader")
        return QueryResult(
            hits=self._reader.search(query, k), generation_id=self.generation_id
        )

    def summary(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "state": self.state.value,
            "generation_id": self.generation_id,
            "cold_start_ms": self.cold_start_ms,
            "bytes_fetched": self.bytes_fetched,
            "invocation_count": self.invocation_count,
        }
