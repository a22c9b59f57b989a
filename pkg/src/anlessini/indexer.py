"""Offline batch path: corpus in, partitioned segments and documents out.

The build makes one statistics pass over the input and then one write
pass per partition, so the corpus itself is never buffered in memory;
only the term statistics are. Output goes either to a local directory
or straight into an object store (``obj://bucket/prefix``).
"""

from __future__ import annotations

import json
import random
import tempfile
import time
from pathlib import Path
from typing import Iterator

from . import fanout
from .docstore import DocStoreClient
from .errors import IndexerError
from .objstore import ObjectStoreClient
from .segment import compute_global_stats, write_segment

FORMATS = ("jsonl", "tsv")


def iter_corpus(input_path: str | Path, fmt: str) -> Iterator[tuple[str, str]]:
    """Yield (id, contents) records; malformed lines abort with their line number."""
    if fmt not in FORMATS:
        raise IndexerError(f"unknown corpus format {fmt!r}, expected one of {FORMATS}")
    path = Path(input_path)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if fmt == "jsonl":
                try:
                    doc = json.loads(line)
                    doc_id, contents = doc["id"], doc["contents"]
                except (ValueError, KeyError, TypeError) as e:
                    raise IndexerError(f"{path}:{lineno}: malformed JSONL record: {e}") from e
                if not isinstance(doc_id, str) or not isinstance(contents, str):
                    raise IndexerError(
                        f"{path}:{lineno}: id and contents must be strings"
                    )
            else:
                parts = line.split("\t", 1)
                if len(parts) != 2:
                    raise IndexerError(f"{path}:{lineno}: expected 'id<TAB>text'")
                doc_id, contents = parts
            if not doc_id:
                raise IndexerError(f"{path}:{lineno}: empty document id")
            yield doc_id, contents


def _check_duplicates(input_path: str | Path, fmt: str) -> int:
    seen: dict[str, int] = {}
    count = 0
    for doc_id, lineno in _with_lines(input_path, fmt):
        if doc_id in seen:
            raise IndexerError(
                f"duplicate id {doc_id!r} at line {lineno} (first seen at line {seen[doc_id]})"
            )
        seen[doc_id] = lineno
        count += 1
    return count


def _with_lines(input_path: str | Path, fmt: str) -> Iterator[tuple[str, int]]:
    # mirrors iter_corpus's line numbering without materializing contents
    lineno_map: Iterator[tuple[str, str]] = iter_corpus(input_path, fmt)
    path = Path(input_path)
    with open(path, "r", encoding="utf-8") as f:
        lineno = 0
        for line in f:
            lineno += 1
            if not line.strip():
                continue
            doc_id, _ = next(lineno_map)
            yield doc_id, lineno


def parse_output(output: str) -> tuple[str, str, str] | Path:
    """'obj://bucket/prefix' -> (scheme marker, bucket, prefix); else local path."""
    if output.startswith("obj://"):
        rest = output[len("obj://"):]
        bucket, _, prefix = rest.partition("/")
        if not bucket:
            raise IndexerError(f"invalid object-store output URL: {output!r}")
        return ("obj", bucket, prefix)
    return Path(output)


def build(
    input_path: str | Path,
    fmt: str,
    partitions: int,
    output: str,
    generation_id: str,
    object_store_url: str | None = None,
) -> dict:
    """Build one generation: P segments with GLOBAL statistics + topology."""
    if partitions < 1:
        raise IndexerError(f"partitions must be >= 1, got {partitions}")
    if not generation_id or "/" in generation_id:
        raise IndexerError(f"invalid generation id: {generation_id!r}")
    started = time.perf_counter()

    doc_count = _check_duplicates(input_path, fmt)
    if doc_count == 0:
        raise IndexerError("corpus is empty")
    stats = compute_global_stats(iter_corpus(input_path, fmt))
    plan = fanout.PartitionPlan(partition_count=partitions)

    dest = parse_output(output)
    summary_parts: list[dict] = []
    total_bytes = 0

    if isinstance(dest, Path):
        gen_root = dest / generation_id
        for i in range(partitions):
            part_dir = gen_root / f"part-{i}"
            sub = (
                (doc_id, text)
                for doc_id, text in iter_corpus(input_path, fmt)
                if plan.partition_of(doc_id) == i
            )
            manifest = write_segment(sub, part_dir, generation_id, stats_override=stats)
            part_bytes = manifest.total_size + len(manifest.to_json_bytes())
            total_bytes += part_bytes
            summary_parts.append(
                {"partition": i, "docs": manifest_local_docs(part_dir), "bytes": part_bytes}
            )
        topo = fanout.topology_json_bytes(partitions)
        (gen_root / fanout.TOPOLOGY_NAME).write_bytes(topo)
        total_bytes += len(topo)
        location = str(gen_root)
    else:
        _, bucket, prefix = dest
        if not object_store_url:
            raise IndexerError("an object store URL is required for obj:// output")
        client = ObjectStoreClient(object_store_url)
        try:
            with tempfile.TemporaryDirectory(prefix="anlessini-build-") as staging:
                for i in range(partitions):
                    part_dir = Path(staging) / f"part-{i}"
                    sub = (
                        (doc_id, text)
                        for doc_id, text in iter_corpus(input_path, fmt)
                        if plan.partition_of(doc_id) == i
                    )
                    manifest = write_segment(
                        sub, part_dir, generation_id, stats_override=stats
                    )
                    key_base = fanout.partition_prefix(prefix, generation_id, i)
                    part_bytes = 0
                    for file in sorted(part_dir.iterdir()):
                        data = file.read_bytes()
                        client.put(bucket, f"{key_base}/{file.name}", data)
                        part_bytes += len(data)
                    total_bytes += part_bytes
                    summary_parts.append(
                        {
                            "partition": i,
                            "docs": manifest_local_docs(part_dir),
                            "bytes": part_bytes,
                        }
                    )
                topo = fanout.topology_json_bytes(partitions)
                client.put(bucket, fanout.topology_key(prefix, generation_id), topo)
                total_bytes += len(topo)
        finally:
            client.close()
        gen_key = f"{prefix}/{generation_id}" if prefix else generation_id
        location = f"obj://{bucket}/{gen_key}"

    return {
        "generation_id": generation_id,
        "doc_count": doc_count,
        "partitions": partitions,
        "per_partition": summary_parts,
        "total_bytes": total_bytes,
        "elapsed_s": time.perf_counter() - started,
        "output": location,
    }


def manifest_local_docs(part_dir: Path) -> int:
    """Docs physically in a partition (its docmap length), not the global count."""
    from .directory import LocalDirectory
    from .segment import SegmentReader

    return SegmentReader(LocalDirectory(part_dir)).local_doc_count


def load_docs(
    input_path: str | Path,
    fmt: str,
    doc_store_url: str,
    sample_rate: float = 0.01,
    rng: random.Random | None = None,
) -> dict:
    """Bulk-load raw documents, then verify a readback sample."""
    _check_duplicates(input_path, fmt)
    client = DocStoreClient(doc_store_url)
    rng = rng or random.Random(0)
    try:
        ids: list[str] = []
        for doc_id, contents in iter_corpus(input_path, fmt):
            client.put_doc({"id": doc_id, "contents": contents})
            ids.append(doc_id)
        if not ids:
            raise IndexerError("corpus is empty")

        sample_size = max(1, round(len(ids) * sample_rate))
        wanted = set(rng.sample(ids, sample_size))
        verified = 0
        for doc_id, contents in iter_corpus(input_path, fmt):
            if doc_id not in wanted:
                continue
            stored = client.get_doc(doc_id)
            if stored != {"id": doc_id, "contents": contents}:
                raise IndexerError(
                    f"readback verification failed for {doc_id!r}: stored payload differs"
                )
            verified += 1
    finally:
        client.close()
    return {"count": len(ids), "sampled": verified, "verified": True}
