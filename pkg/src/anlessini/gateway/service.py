"""Gateway coordinator: pools, hydration, swap, metrics.

The service owns one FunctionPool per partition plus a doc-store client
for hydrating search hits. Queries run through the pool (or the fanout
layer when partitioned); the raw payloads are then attached at the
gateway, so the function boundary stays search-only and a missing
payload degrades to docid+score rather than failing the request.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from pathlib import Path
from typing import Callable, Protocol

from .. import fanout
from ..directory import Directory, LocalDirectory
from ..errors import DocumentNotFound, GenerationError
from ..runtime.billing import BillingLedger, billing_report
from ..runtime.config import FunctionConfig
from ..runtime.pool import FunctionPool
from .models import (
    LatencySummary,
    MetricsResponse,
    PoolStatus,
    SearchHit,
    SearchResponse,
    StatusResponse,
    SwapResponse,
)

_LATENCY_WINDOW = 1024


class DocumentSource(Protocol):
    def get_doc(self, external_doc_id: str) -> dict: ...
    def batch_get(self, ids: list[str]) -> tuple[dict[str, dict], list[str]]: ...


class SearchService:
    def __init__(
        self,
        pools: list[FunctionPool],
        documents: DocumentSource | None,
        ledger: BillingLedger,
        verifier: Callable[[str], list[str]] | None = None,
    ):
        if not pools:
            raise ValueError("at least one partition pool is required")
        self._pools = pools
        self._documents = documents
        self._ledger = ledger
        self._verifier = verifier
        self._lock = threading.Lock()
        self._latencies: deque[float] = deque(maxlen=_LATENCY_WINDOW)
        self._search_times: deque[float] = deque(maxlen=8192)

    @property
    def partitions(self) -> int:
        return len(self._pools)

    @property
    def pools(self) -> list[FunctionPool]:
        return self._pools

    def search(self, query: str, k: int) -> SearchResponse:
        started = time.perf_counter()
        if len(self._pools) == 1:
            result, record = self._pools[0].invoke(query, k)
            records = [record]
        else:
            result, records = fanout.scatter_gather(self._pools, query, k)

        payloads: dict[str, dict] = {}
        ids = [hit.external_doc_id for hit in result.hits]
        if ids and self._documents is not None:
            payloads, _missing = self._documents.batch_get(ids)

        latency_ms = (time.perf_counter() - started) * 1000.0
        with self._lock:
            self._latencies.append(latency_ms)
            self._search_times.append(time.time())
        return SearchResponse(
            query=query,
            k=k,
            results=[
                SearchHit(
                    docid=h.external_doc_id,
                    score=h.score,
                    document=payloads.get(h.external_doc_id),
                )
                for h in result.hits
            ],
            generation_id=result.generation_id,
            latency_ms=latency_ms,
            cost_usd=sum(r.cost_usd for r in records),
            cold=any(r.cold for r in records),
        )

    def get_doc(self, external_doc_id: str) -> dict:
        if self._documents is None:
            raise DocumentNotFound("no document store configured")
        return self._documents.get_doc(external_doc_id)

    def swap(self, generation_id: str) -> SwapResponse:
        previous = self._pools[0].target_generation
        if self._verifier is not None:
            missing = self._verifier(generation_id)
            if missing:
                raise GenerationError(
                    f"generation {generation_id!r} is incomplete", missing=missing
                )
        for pool in self._pools:
            pool.refresh_generation(generation_id)
        return SwapResponse(accepted=True, previous=previous, target=generation_id)

    def status(self) -> StatusResponse:
        snaps = [pool.snapshot() for pool in self._pools]
        target = snaps[0]["target_generation"]
        current = sorted(
            {i["generation_id"] for s in snaps for i in s["instances"]}
        )
        return StatusResponse(
            partitions=len(self._pools),
            target_generation=target,
            current_generations=current,
            draining=any(g != target for g in current),
            pools=[
                PoolStatus(
                    name=s["name"],
                    target_generation=s["target_generation"],
                    provisioning=s["provisioning"],
                    instances=s["instances"],
                )
                for s in snaps
            ],
        )

    def metrics(self) -> MetricsResponse:
        with self._lock:
            latencies = sorted(self._latencies)
            now = time.time()
            recent = sum(1 for t in self._search_times if now - t <= 60.0)
        if latencies:
            p50 = latencies[len(latencies) // 2]
            p95 = latencies[min(len(latencies) - 1, int(0.95 * len(latencies)))]
        else:
            p50 = p95 = 0.0
        instances = [
            i for pool in self._pools for i in pool.snapshot()["instances"]
        ]
        return MetricsResponse(
            instances=instances,
            billing=billing_report(self._ledger.records()),
            qps_1m=recent / 60.0,
            latency_ms=LatencySummary(p50_ms=p50, p95_ms=p95),
        )


def build_local_service(
    index_root: str | Path,
    generation_id: str,
    partitions: int,
    documents: DocumentSource | None = None,
    function_config: FunctionConfig | None = None,
    ledger: BillingLedger | None = None,
) -> SearchService:
    """Service over segments on the local filesystem (layout
    {root}/{generation}/part-{i}), mainly for tests and offline use."""
    root = Path(index_root)
    cfg = function_config or FunctionConfig()
    led = ledger or BillingLedger()

    def existing(prefix: str) -> set[str]:
        # mirror object-store keys: path below root, forward slashes
        found = set()
        if root.exists():
            for p in root.rglob("*"):
                if p.is_file():
                    found.add(p.relative_to(root).as_posix())
        return {k for k in found if k.startswith(prefix)}

    def verifier(gen: str) -> list[str]:
        return fanout.verify_generation(existing, "", gen, partitions)

    pools = []
    for i in range(partitions):
        def factory(gen: str, i: int = i) -> Directory:
            return LocalDirectory(root / gen / f"part-{i}")

        pools.append(
            FunctionPool(
                FunctionConfig(
                    index_prefix=f"{root}/{{generation}}/part-{i}",
                    generation_id=generation_id,
                    memory_gb=cfg.memory_gb,
                    max_instances=cfg.max_instances,
                    idle_ttl_s=cfg.idle_ttl_s,
                    rate_usd_per_gb_s=cfg.rate_usd_per_gb_s,
                    queue_timeout_s=cfg.queue_timeout_s,
                    instance_floor=cfg.instance_floor,
                    bill_cold_start=cfg.bill_cold_start,
                ),
                factory,
                ledger=led,
                name=f"part-{i}",
            )
        )
    return SearchService(pools, documents, led, verifier=verifier)
