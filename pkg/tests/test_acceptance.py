"""Acceptance suite: one verdict line per criterion, tolerances pinned inline.

Each test prints "[PASS] ..." or "[FAIL] ..." (also echoed in the terminal
summary) and asserts the criterion's stated runtime budget. These exercise
the system end to end: real HTTP between components wherever byte or
latency accounting is on trial, in-process wiring where it is not.
"""

import random
import statistics
import threading
import time
from contextlib import contextmanager

import httpx
import pytest

from anlessini.codec import decode_postings, encode_postings
from anlessini.directory import LocalDirectory
from anlessini.docstore import DocLog
from anlessini.docstore import make_app as make_docstore_app
from anlessini.docstore.client import DocStoreClient
from anlessini.fanout import partition_corpus, scatter_gather, topology_json_bytes
from anlessini.gateway import build_local_service, make_app
from anlessini.hosting import ServerHandle
from anlessini.indexer import load_docs
from anlessini.objstore import BlobStore, ObjectStoreClient
from anlessini.objstore import make_app as make_objstore_app
from anlessini.objstore.client import RemoteDirectory
from anlessini.runtime import (
    BillingLedger,
    FunctionConfig,
    FunctionPool,
    billing_report,
    invocation_cost,
    simulate_schedule,
)
from anlessini.segment import MANIFEST_NAME, SegmentManifest, open_reader, write_segment

from helpers import oracle_topk, random_queries, synth_corpus, write_jsonl

CRITERIA_LINES: list[str] = []


@contextmanager
def criterion(label: str, budget_s: float):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        CRITERIA_LINES.append(f"[FAIL] {label}")
        print(f"[FAIL] {label}")
        raise
    elapsed = time.perf_counter() - started
    line = f"[PASS] {label} ({elapsed:.1f}s)"
    CRITERIA_LINES.append(line)
    print(line)
    assert elapsed < budget_s, f"criterion exceeded its runtime budget: {elapsed:.1f}s >= {budget_s}s"


@pytest.fixture(scope="module")
def corpus10k():
    return synth_corpus(10_000, seed=101)


@pytest.fixture(scope="module")
def segment10k(tmp_path_factory, corpus10k):
    """One local 10,000-doc single-partition generation, built once."""
    root = tmp_path_factory.mktemp("seg10k")
    write_segment(corpus10k, root / "g1" / "part-0", "g1")
    return root


def test_cost_model_exactness():
    with criterion(
        "cost model: cost(2.0 GB, 0.3 s) = 2.0*0.3*0.000016667 within 1e-12 abs; "
        "1/cost within 0.01% of 100,000 queries/USD",
        budget_s=5.0,
    ):
        cost = invocation_cost(2.0, 0.3)
        assert abs(cost - 2.0 * 0.3 * 0.000016667) < 1e-12
        queries_per_dollar = 1.0 / cost
        assert round(queries_per_dollar) == 99_998
        assert abs(queries_per_dollar - 100_000) / 100_000 < 1e-4


def test_fungibility_of_load():
    with criterion(
        "fungibility: 1,000 invocations at 10 QPS vs 100 QPS, fixed (gb, duration); "
        "ledger totals equal within 1e-12",
        budget_s=60.0,
    ):
        slow, slow_span = simulate_schedule(1000, qps=10, memory_gb=2.0, duration_s=0.3)
        fast, fast_span = simulate_schedule(1000, qps=100, memory_gb=2.0, duration_s=0.3)
        total_slow = billing_report(slow)["total_cost_usd"]
        total_fast = billing_report(fast)["total_cost_usd"]
        assert abs(total_slow - total_fast) < 1e-12
        assert slow_span > fast_span  # the schedules really are different


def test_cold_warm_byte_accounting(tmp_path, corpus10k, segment10k):
    with criterion(
        "cold/warm byte accounting: 10,000-doc corpus via object store; first fetch == "
        "manifest file-size sum (+manifest itself); stats endpoint agrees; 100 warm "
        "invocations add zero segment bytes",
        budget_s=120.0,
    ):
        store = BlobStore(tmp_path / "objects")
        server = ServerHandle(make_objstore_app(store)).start()
        client = ObjectStoreClient(server.base_url)
        try:
            seg_dir = segment10k / "g1" / "part-0"
            prefix = "idx/g1/part-0"
            stats_prefix = f"bucket/{prefix}"  # stats keys are bucket-qualified
            for p in sorted(seg_dir.iterdir()):
                client.put("bucket", f"{prefix}/{p.name}", p.read_bytes())

            manifest = SegmentManifest.from_json_bytes((seg_dir / MANIFEST_NAME).read_bytes())
            expected = sum(f.size for f in manifest.files)
            expected += (seg_dir / MANIFEST_NAME).stat().st_size

            pool = FunctionPool(
                FunctionConfig(generation_id="g1"),
                lambda gen: RemoteDirectory(client, "bucket", f"idx/{gen}/part-0"),
            )
            _, record = pool.invoke("alpha to", 10)
            assert record.cold is True
            inst = pool.instances()[0]
            assert inst.bytes_fetched == expected

            served = client.stats()["per_key_bytes_served"]
            segment_served = {k: v for k, v in served.items() if k.startswith(stats_prefix)}
            assert sum(segment_served.values()) == expected

            for _ in range(100):
                _, record = pool.invoke("alpha to", 10)
                assert record.cold is False
            served_after = client.stats()["per_key_bytes_served"]
            segment_after = {k: v for k, v in served_after.items() if k.startswith(stats_prefix)}
            assert segment_after == segment_served  # zero new segment bytes
        finally:
            client.close()
            server.stop()


def test_cold_dominance(segment10k):
    with criterion(
        "cold dominance: 20 fresh-pool trials; median cold duration strictly exceeds "
        "median warm duration",
        budget_s=120.0,
    ):
        cold_durations = []
        warm_durations = []
        for _ in range(20):
            pool = FunctionPool(
                FunctionConfig(generation_id="g1"),
                lambda gen: LocalDirectory(segment10k / gen / "part-0"),
            )
            _, cold_record = pool.invoke("alpha to ra", 10)
            assert cold_record.cold is True
            _, warm_record = pool.invoke("alpha to ra", 10)
            assert warm_record.cold is False
            cold_durations.append(cold_record.duration_s)
            warm_durations.append(warm_record.duration_s)
        assert statistics.median(cold_durations) > statistics.median(warm_durations)


def test_oracle_ranking_equivalence(tmp_path):
    with criterion(
        "oracle ranking equivalence: 20 random corpora (<=1,000 docs) x 50 queries; "
        "top-10 docids exactly equal brute-force BM25, scores within 1e-6 relative",
        budget_s=120.0,
    ):
        rng = random.Random(202)
        for trial in range(20):
            n = rng.randint(50, 1000)
            corpus = synth_corpus(n, seed=1000 + trial)
            seg_dir = tmp_path / f"trial-{trial}"
            write_segment(corpus, seg_dir, "g1")
            reader = open_reader(LocalDirectory(seg_dir))
            for query in random_queries(corpus, 50, seed=trial):
                got = reader.search(query, 10)
                want = oracle_topk(corpus, query, 10)
                assert [h.external_doc_id for h in got] == [d for d, _ in want]
                for hit, (_, score) in zip(got, want):
                    assert hit.score == pytest.approx(score, rel=1e-6)


def test_partition_merge_equivalence(tmp_path):
    with criterion(
        "partition-merge equivalence: P in {2,4,8} over 2,000 docs x 100 queries; "
        "scatter_gather top-10 docids exact, scores within 1e-6",
        budget_s=180.0,
    ):
        corpus = synth_corpus(2000, seed=303)
        write_segment(corpus, tmp_path / "whole", "g1")
        whole = open_reader(LocalDirectory(tmp_path / "whole"))
        queries = random_queries(corpus, 100, seed=9)

        for partitions in (2, 4, 8):
            buckets, _, stats = partition_corpus(corpus, partitions)
            gen_root = tmp_path / f"p{partitions}"
            pools = []
            for i, bucket in enumerate(buckets):
                part_dir = gen_root / "g1" / f"part-{i}"
                write_segment(bucket, part_dir, "g1", stats_override=stats)
                pools.append(
                    FunctionPool(
                        FunctionConfig(generation_id="g1"),
                        lambda gen, d=part_dir: LocalDirectory(d),
                        name=f"part-{i}",
                    )
                )
            for query in queries:
                result, _ = scatter_gather(pools, query, 10)
                want = whole.search(query, 10)
                assert [h.external_doc_id for h in result.hits] == [
                    w.external_doc_id for w in want
                ], f"P={partitions} q={query!r}"
                for got, expected in zip(result.hits, want):
                    assert got.score == pytest.approx(expected.score, rel=1e-6)


def test_swap_atomicity(tmp_path):
    DRAIN_WINDOW_S = 0.5
    with criterion(
        "swap atomicity: 1,000 queries streamed across a generation swap; every response "
        "single-generation; observed ids == {old,new}; no old responses past a "
        f"{DRAIN_WINDOW_S}s drain window",
        budget_s=120.0,
    ):
        corpus = synth_corpus(400, seed=404)
        root = tmp_path / "index"
        for gen in ("g-old", "g-new"):
            buckets, _, stats = partition_corpus(corpus, 2)
            for i, bucket in enumerate(buckets):
                write_segment(bucket, root / gen / f"part-{i}", gen, stats_override=stats)
            (root / gen / "topology.json").write_bytes(topology_json_bytes(2))

        service = build_local_service(root, "g-old", 2)
        queries = random_queries(corpus, 40, seed=5)
        observed: list[tuple[float, str]] = []
        lock = threading.Lock()

        def worker(worker_id: int):
            for j in range(125):
                resp = service.search(queries[(worker_id + j) % len(queries)], 5)
                with lock:
                    observed.append((time.monotonic(), resp.generation_id))

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        while True:
            with lock:
                if len(observed) >= 300:
                    break
            time.sleep(0.005)
        service.swap("g-new")
        for t in threads:
            t.join()

        assert len(observed) == 1000
        generations = {gen for _, gen in observed}
        assert generations == {"g-old", "g-new"}
        first_new = min(ts for ts, gen in observed if gen == "g-new")
        stragglers = [
            (ts, gen)
            for ts, gen in observed
            if gen == "g-old" and ts > first_new + DRAIN_WINDOW_S
        ]
        assert stragglers == []


def test_codec_and_store_round_trips(tmp_path, corpus10k):
    with criterion(
        "codec/store round-trips: 10,000 random postings lists decode(encode(x)) == x; "
        "100 ranged GETs equal local slices; doc store restarts with full readback",
        budget_s=120.0,
    ):
        # postings codec identity
        rng = random.Random(505)
        for _ in range(10_000):
            ordinal = rng.randrange(0, 50)
            postings = []
            for _ in range(rng.randrange(1, 30)):
                postings.append((ordinal, rng.randint(1, 2**17)))
                ordinal += rng.randint(1, 1000)
            assert decode_postings(encode_postings(postings), len(postings)) == postings

        # ranged reads against a real served blob
        store = BlobStore(tmp_path / "objects")
        server = ServerHandle(make_objstore_app(store)).start()
        client = ObjectStoreClient(server.base_url)
        try:
            blob = rng.randbytes(1 << 20)
            client.put("bucket", "blob", blob)
            for _ in range(100):
                start = rng.randrange(0, len(blob))
                end = rng.randrange(start, len(blob))
                assert client.get("bucket", "blob", byte_range=(start, end)) == blob[start : end + 1]
        finally:
            client.close()
            server.stop()

        # doc store: load the full corpus over HTTP, restart, read everything back
        log_path = tmp_path / "docs.jsonl"
        log = DocLog(log_path)
        server = ServerHandle(make_docstore_app(log)).start()
        client = DocStoreClient(server.base_url)
        try:
            for doc_id, text in corpus10k:
                client.put_doc({"id": doc_id, "contents": text})
        finally:
            client.close()
            server.stop()
            log.close()

        reopened = DocLog(log_path)
        server = ServerHandle(make_docstore_app(reopened)).start()
        client = DocStoreClient(server.base_url)
        try:
            assert client.count() == len(corpus10k)
            ids = [doc_id for doc_id, _ in corpus10k]
            by_id = dict(corpus10k)
            for i in range(0, len(ids), 100):
                chunk = ids[i : i + 100]
                found, missing = client.batch_get(chunk)
                assert missing == []
                for doc_id in chunk:
                    assert found[doc_id] == {"id": doc_id, "contents": by_id[doc_id]}
        finally:
            client.close()
            server.stop()
            reopened.close()


def test_desk_scale_substitute_and_warm_latency(tmp_path, corpus10k):
    # The reference system's measured scale (an 8.8M-passage index of ~700 MB
    # in cloud object storage, end-to-end under 300 ms against cloud FaaS) is
    # NOT reproducible on a desk; this artifact substitutes a 10,000-passage
    # corpus and a local warm-latency target that is consistent with, but not
    # a reproduction of, that measurement.
    with criterion(
        "desk-scale substitute (cloud-scale corpus/latency NOT reproduced here): "
        "10,000-passage corpus indexes and serves; warm gateway p95 < 100 ms over HTTP",
        budget_s=120.0,
    ):
        from anlessini.boot import build_remote_service
        from anlessini.indexer import build

        corpus_path = write_jsonl(tmp_path / "corpus.jsonl", corpus10k)

        blob_store = BlobStore(tmp_path / "objects")
        obj_server = ServerHandle(make_objstore_app(blob_store)).start()
        doc_log = DocLog(tmp_path / "docs.jsonl")
        doc_server = ServerHandle(make_docstore_app(doc_log)).start()
        gateway_server = None
        clients = []
        try:
            summary = build(
                corpus_path, "jsonl", 2, "obj://bucket/idx", "g1",
                object_store_url=obj_server.base_url,
            )
            assert summary["doc_count"] == 10_000
            load_docs(corpus_path, "jsonl", doc_server.base_url, sample_rate=0.001)

            service, clients = build_remote_service(
                obj_server.base_url, "bucket", "idx", "g1",
                partitions=None,  # discovered from the uploaded topology
                doc_store_url=doc_server.base_url,
                function_config=FunctionConfig(generation_id="g1"),
                ledger=BillingLedger(),
            )
            gateway_server = ServerHandle(make_app(service)).start()

            queries = random_queries(corpus10k, 50, seed=77)
            with httpx.Client(base_url=gateway_server.base_url, timeout=30.0) as http:
                for q in queries[:5]:  # provision/warm every partition
                    assert http.get("/v1/search", params={"q": q, "k": 10}).status_code == 200
                latencies = []
                for i in range(200):
                    q = queries[i % len(queries)]
                    t0 = time.perf_counter()
                    resp = http.get("/v1/search", params={"q": q, "k": 10})
                    latencies.append((time.perf_counter() - t0) * 1000.0)
                    body = resp.json()
                    assert resp.status_code == 200
                    assert body["cold"] is False
                    # hydration really happened through the doc store
                    for hit in body["results"]:
                        assert hit["document"] is not None
            latencies.sort()
            p95 = latencies[int(0.95 * len(latencies))]
            assert p95 < 100.0, f"warm p95 {p95:.1f}ms"
        finally:
            for c in clients:
                c.close()
            if gateway_server:
                gateway_server.stop()
            doc_server.stop()
            obj_server.stop()
            doc_log.close()


def test_gateway_stability_mixed_requests(tmp_path):
    # gateway invariant rather than a numbered criterion: 10,000 sequential
    # valid/invalid mixed requests produce no 5xx other than deliberate overload
    with criterion(
        "gateway stability: 10,000 mixed valid/invalid requests, zero unintended 5xx",
        budget_s=180.0,
    ):
        from fastapi.testclient import TestClient

        corpus = synth_corpus(150, seed=606)
        root = tmp_path / "index"
        buckets, _, stats = partition_corpus(corpus, 1)
        write_segment(buckets[0], root / "g1" / "part-0", "g1", stats_override=stats)
        (root / "g1" / "topology.json").write_bytes(topology_json_bytes(1))
        service = build_local_service(root, "g1", 1)
        queries = random_queries(corpus, 25, seed=3)

        mixed = []
        for i in range(10_000):
            kind = i % 8
            if kind < 4:
                mixed.append(("/v1/search", {"q": queries[i % len(queries)], "k": "10"}))
            elif kind == 4:
                mixed.append(("/v1/search", {"q": ""}))  # 400
            elif kind == 5:
                mixed.append(("/v1/search", {"q": "ok", "k": "banana"}))  # 400
            elif kind == 6:
                mixed.append((f"/v1/doc/doc-{i % 150:05d}", None))  # 200 or 404
            else:
                mixed.append(("/v1/metrics", None))

        with TestClient(make_app(service), raise_server_exceptions=False) as http:
            for path, params in mixed:
                resp = http.get(path, params=params)
                assert resp.status_code < 500, f"{path} -> {resp.status_code}"
