"""Desk-scale serverless search stack.

A stateless search function reads an immutable inverted index out of an
object store through a byte-level directory abstraction, caches it in
memory on cold start, and serves BM25 top-k queries. A pool manager gives
the function FaaS semantics (cold/warm instances, autoscaling, GB-second
billing), partitioned indexes are queried scatter-gather, and a REST
gateway fronts the whole thing.
"""

__version__ = "0.1.0"

from .analysis import analyze
from .directory import CachingDirectory, Directory, IndexInput, LocalDirectory
from .scoring import ScoredDoc, bm25_score
from .segment import (
    GlobalStats,
    SegmentManifest,
    SegmentReader,
    compute_global_stats,
    open_reader,
    write_segment,
)

__all__ = [
    "analyze",
    "bm25_score",
    "compute_global_stats",
    "open_reader",
    "write_segment",
    "CachingDirectory",
    "Directory",
    "GlobalStats",
    "IndexInput",
    "LocalDirectory",
    "ScoredDoc",
    "SegmentManifest",
    "SegmentReader",
    "__version__",
]
