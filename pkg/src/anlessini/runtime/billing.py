"""GB-second billing: records, the append-only ledger, and reports.

Cost per invocation is memory_gb * duration_s * rate, computed exactly
with no rounding step. Total cost over a set of records is therefore a
pure function of the multiset of (memory_gb, duration_s) pairs: when the
per-query shape is fixed, serving 10 QPS for 10,000 seconds costs the
same as 100 QPS for 1,000 seconds.
"""

from __future__ import annotations

import json
import math
import statistics
import threading
from dataclasses import asdict, dataclass
from pathlib import Path

from .config import DEFAULT_RATE_USD_PER_GB_S


@dataclass(frozen=True)
class BillingRecord:
    invocation_id: str
    ts: float
    memory_gb: float
    duration_s: float
    cost_usd: float
    cold: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> BillingRecord:
        doc = json.loads(line)
        return cls(
            invocation_id=doc["invocation_id"],
            ts=float(doc["ts"]),
            memory_gb=float(doc["memory_gb"]),
            duration_s=float(doc["duration_s"]),
            cost_usd=float(doc["cost_usd"]),
            cold=bool(doc["cold"]),
        )


def invocation_cost(
    memory_gb: float, duration_s: float, rate: float = DEFAULT_RATE_USD_PER_GB_S
) -> float:
    return memory_gb * duration_s * rate


class BillingLedger:
    """Append-only JSONL billing log, one record per line.

    Thread-safe. Keeps records in memory as well, so reports do not
    re-read the file; a ledger opened over an existing file loads it.
    """

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._records: list[BillingRecord] = []
        self._file = None
        if path is not None:
            p = Path(path)
            p.parent.mkdir(parents=True, exist_ok=True)
            if p.exists():
                with open(p, "r", encoding="utf-8") as f:
                    self._records = [BillingRecord.from_json(ln) for ln in f if ln.strip()]
            self._file = open(p, "a", encoding="utf-8")

    def append(self, record: BillingRecord) -> None:
        with self._lock:
            self._records.append(record)
            if self._file is not None:
                self._file.write(record.to_json() + "\n")
                self._file.flush()

    def records(self) -> list[BillingRecord]:
        with self._lock:
            return list(self._records)

    def close(self) -> None:
        with self._lock:
            if self._file is not None:
                self._file.close()
                self._file = None


def billing_report(
    records: list[BillingRecord],
    window: tuple[float, float] | None = None,
) -> dict:
    """Aggregate ``records`` (optionally restricted to ts in [start, end])."""
    if window is not None:
        start, end = window
        records = [r for r in records if start <= r.ts <= end]
    if not records:
        return {
            "invocations": 0,
            "total_cost_usd": 0.0,
            "cold_count": 0,
            "mean_duration_s": 0.0,
            "median_duration_s": 0.0,
            "p95_duration_s": 0.0,
        }
    durations = sorted(r.duration_s for r in records)
    # nearest-rank p95
    p95 = durations[min(len(durations) - 1, math.ceil(0.95 * len(durations)) - 1)]
    return {
        "invocations": len(records),
        "total_cost_usd": sum(r.cost_usd for r in records),
        "cold_count": sum(1 for r in records if r.cold),
        "mean_duration_s": statistics.fmean(durations),
        "median_duration_s": statistics.median(durations),
        "p95_duration_s": p95,
    }


def simulate_schedule(
    count: int,
    qps: float,
    memory_gb: float,
    duration_s: float,
    rate: float = DEFAULT_RATE_USD_PER_GB_S,
) -> tuple[list[BillingRecord], float]:
    """Synthesize ``count`` invocation records arriving at ``qps``.

    Returns the records plus the simulated wall-clock span of the
    schedule. No real time passes; this exists to compare costs of
    different arrival schedules over identical per-query shapes.
    """
    if count < 1 or qps <= 0:
        raise ValueError("count must be >= 1 and qps > 0")
    records = []
    for i in range(count):
        arrival = i / qps
        records.append(
            BillingRecord(
                invocation_id=f"sim-{i:08d}",
                ts=arrival,
                memory_gb=memory_gb,
                duration_s=duration_s,
                cost_usd=invocation_cost(memory_gb, duration_s, rate),
                cold=False,
            )
        )
    span = (count - 1) / qps + duration_s
    return records, span
