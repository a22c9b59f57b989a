"""Document-partitioned serving: hash partitioning and scatter-gather.

Each partition is a complete segment built with GLOBAL statistics (the
full corpus's doc count, average length, and per-term frequencies baked
in at build time), so a document's BM25 score is identical whether it
sits in a partition or in one unpartitioned index. Scatter-gather then
only has to merge per-partition top-k lists under the total order
(score desc, external_doc_id asc) to reproduce single-index results
exactly.
"""

from __future__ import annotations

import heapq
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import FanoutError
from .runtime.billing import BillingRecord
from .runtime.instance import QueryResult
from .runtime.pool import FunctionPool
from .segment import GlobalStats, SEGMENT_FILES, compute_global_stats

FNV64_OFFSET = 14695981039346656037
FNV64_PRIME = 1099511628211
HASH_NAME = "fnv1a64"

TOPOLOGY_NAME = "topology.json"

# one segment's files plus the manifest; a complete partition has all of these
REQUIRED_PARTITION_FILES = ("manifest.json",) + SEGMENT_FILES


def fnv1a64(data: str | bytes) -> int:
    """FNV-1a, 64-bit. Stable across runs and platforms by construction."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class PartitionPlan:
    partition_count: int
    hash_name: str = HASH_NAME

    def partition_of(self, external_doc_id: str) -> int:
        return fnv1a64(external_doc_id) % self.partition_count


def partition_corpus(
    corpus: Iterable[tuple[str, str]], partitions: int
) -> tuple[list[list[tuple[str, str]]], PartitionPlan, GlobalStats]:
    """Split the corpus by id hash; also computes the global statistics
    every partition must be built with."""
    if partitions < 1:
        raise ValueError(f"partitions must be >= 1, got {partitions}")
    docs = list(corpus)
    plan = PartitionPlan(partition_count=partitions)
    buckets: list[list[tuple[str, str]]] = [[] for _ in range(partitions)]
    for doc_id, text in docs:
        buckets[plan.partition_of(doc_id)].append((doc_id, text))
    return buckets, plan, compute_global_stats(docs)


def _join(*parts: str) -> str:
    return "/".join(p for p in parts if p)


def partition_prefix(prefix: str, generation_id: str, partition: int) -> str:
    return _join(prefix, generation_id, f"part-{partition}")


def topology_key(prefix: str, generation_id: str) -> str:
    return _join(prefix, generation_id, TOPOLOGY_NAME)


def topology_json_bytes(partitions: int) -> bytes:
    doc = {"P": partitions, "hash": HASH_NAME, "stats_scope": "GLOBAL"}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def parse_topology(data: bytes) -> int:
    try:
        doc = json.loads(data)
        partitions = int(doc["P"])
        if doc.get("hash") != HASH_NAME or doc.get("stats_scope") != "GLOBAL":
            raise ValueError(f"unsupported topology: {doc}")
        if partitions < 1:
            raise ValueError(f"bad partition count: {partitions}")
        return partitions
    except (KeyError, TypeError, ValueError) as e:
        raise FanoutError(f"malformed {TOPOLOGY_NAME}: {e}") from e


def required_generation_files(prefix: str, generation_id: str, partitions: int) -> list[str]:
    """Every object key a complete generation must have under the prefix."""
    needed = [_join(prefix, generation_id, TOPOLOGY_NAME)]
    for i in range(partitions):
        base = partition_prefix(prefix, generation_id, i)
        needed.extend(f"{base}/{name}" for name in REQUIRED_PARTITION_FILES)
    return needed


def verify_generation(
    existing_keys: Callable[[str], set[str]],
    prefix: str,
    generation_id: str,
    partitions: int,
) -> list[str]:
    """Missing-file list for a generation; empty means complete.

    ``existing_keys(key_prefix)`` returns the stored keys under a prefix.
    """
    have = existing_keys(_join(prefix, generation_id) + "/")
    return [k for k in required_generation_files(prefix, generation_id, partitions) if k not in have]


def merge_topk(partial: Sequence[Sequence], k: int) -> list:
    """k best of the union under (score desc, external_doc_id asc)."""
    candidates = [hit for hits in partial for hit in hits]
    return heapq.nsmallest(k, candidates, key=lambda h: (-h.score, h.external_doc_id))


def scatter_gather(
    pools: Sequence[FunctionPool],
    query: str,
    k: int,
    max_retries: int = 3,
) -> tuple[QueryResult, list[BillingRecord]]:
    """Query every partition pool with limit k, merge, truncate to k.

    Any partition failure fails the query (partial results would break
    the single-index equivalence contract). If a generation swap lands
    mid-flight the partitions can answer from different generations;
    that attempt is discarded and the scatter retried, bounded by
    ``max_retries``.
    """
    if not pools:
        raise FanoutError("no partition pools configured")
    last_generations: set[str] = set()
    for _ in range(max_retries + 1):
        results: list[QueryResult] = [None] * len(pools)  # type: ignore[list-item]
        records: list[BillingRecord] = []
        with ThreadPoolExecutor(max_workers=len(pools)) as pox:
            futures = [pox.submit(pool.invoke, query, k) for pool in pools]
            error: tuple[int, BaseException] | None = None
            for i, fut in enumerate(futures):
                try:
                    result, record = fut.result()
                    results[i] = result
                    records.append(record)
                except BaseException as e:  # noqa: BLE001 - rewrapped below
                    if error is None:
                        error = (i, e)
        if error is not None:
            i, e = error
            raise FanoutError(f"partition {i} failed: {e}", partition=i) from e
        generations = {r.generation_id for r in results}
        if len(generations) == 1:
            merged = merge_topk([r.hits for r in results], k)
            return QueryResult(hits=merged, generation_id=generations.pop()), records
        last_generations = generations  # swap caught mid-flight; retry
    raise FanoutError(
        f"partitions answered from mixed generations {sorted(last_generations)} "
        f"after {max_retries} retries"
    )
