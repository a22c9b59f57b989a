"""Deployment assembly: wire stores, pools, and gateway together.

Two modes, chosen per store by whether a URL was provided:

- remote: the store already runs elsewhere; we just point a client at it.
- embedded: boot the store in-process on an ephemeral localhost port and
  point a client at that. Components still talk HTTP to each other, so
  single-host behavior matches a spread-out deployment.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import fanout
from .directory import Directory
from .docstore import DocLog, DocStoreClient
from .docstore import make_app as make_docstore_app
from .errors import GenerationError
from .gateway import SearchService, make_app as make_gateway_app
from .hosting import ServerHandle
from .objstore import BlobStore, ObjectStoreClient, RemoteDirectory
from .objstore import make_app as make_objstore_app
from .runtime import BillingLedger, FunctionConfig, FunctionPool
from .runtime.config import ServeSettings

logger = logging.getLogger("anlessini.boot")


@dataclass
class Deployment:
    """Everything a running node owns; stop() tears it down in order."""

    gateway_app: object
    service: SearchService
    object_store_url: str
    doc_store_url: str
    servers: list[ServerHandle] = field(default_factory=list)
    clients: list = field(default_factory=list)

    def stop(self) -> None:
        for server in reversed(self.servers):
            server.stop()
        for client in self.clients:
            client.close()


def discover_partitions(
    client: ObjectStoreClient, bucket: str, prefix: str, generation_id: str
) -> int:
    key = fanout.topology_key(prefix, generation_id)
    return fanout.parse_topology(client.get(bucket, key))


def build_remote_service(
    object_store_url: str,
    bucket: str,
    prefix: str,
    generation_id: str,
    partitions: int | None,
    doc_store_url: str | None,
    function_config: FunctionConfig,
    ledger: BillingLedger,
) -> tuple[SearchService, list]:
    """Pools over an object store reached by URL; returns service + clients to close."""
    store = ObjectStoreClient(object_store_url)
    clients: list = [store]

    if partitions is None:
        partitions = discover_partitions(store, bucket, prefix, generation_id)

    def existing(key_prefix: str) -> set[str]:
        return {m.key for m in store.list(bucket, key_prefix)}

    def verifier(gen: str) -> list[str]:
        return fanout.verify_generation(existing, prefix, gen, partitions)

    missing = verifier(generation_id)
    if missing:
        raise GenerationError(
            f"generation {generation_id!r} is incomplete in {bucket!r}", missing=missing
        )

    pools = []
    for i in range(partitions):
        def factory(gen: str, i: int = i) -> Directory:
            return RemoteDirectory(store, bucket, fanout.partition_prefix(prefix, gen, i))

        pools.append(
            FunctionPool(
                FunctionConfig(
                    index_prefix=f"{bucket}/{prefix}/{{generation}}/part-{i}",
                    generation_id=generation_id,
                    memory_gb=function_config.memory_gb,
                    max_instances=function_config.max_instances,
                    idle_ttl_s=function_config.idle_ttl_s,
                    rate_usd_per_gb_s=function_config.rate_usd_per_gb_s,
                    queue_timeout_s=function_config.queue_timeout_s,
                    instance_floor=function_config.instance_floor,
                    bill_cold_start=function_config.bill_cold_start,
                ),
                factory,
                ledger=ledger,
                name=f"part-{i}",
            )
        )

    documents = None
    if doc_store_url:
        documents = DocStoreClient(doc_store_url)
        clients.append(documents)
    return SearchService(pools, documents, ledger, verifier=verifier), clients


def boot_deployment(settings: ServeSettings) -> Deployment:
    """Assemble a full node from settings; embedded stores spin up as needed."""
    servers: list[ServerHandle] = []
    data_dir = Path(settings.data_dir)

    object_store_url = settings.object_store_url
    if not object_store_url:
        blob_store = BlobStore(data_dir / "objects")
        handle = ServerHandle(make_objstore_app(blob_store)).start()
        servers.append(handle)
        object_store_url = handle.base_url
        logger.info("embedded object store at %s", object_store_url)

    doc_store_url = settings.doc_store_url
    if not doc_store_url:
        doc_log = DocLog(data_dir / "docs.jsonl")
        handle = ServerHandle(make_docstore_app(doc_log)).start()
        servers.append(handle)
        doc_store_url = handle.base_url
        logger.info("embedded doc store at %s", doc_store_url)

    ledger = BillingLedger(settings.ledger_path)
    try:
        service, clients = build_remote_service(
            object_store_url=object_store_url,
            bucket=settings.bucket,
            prefix=settings.prefix,
            generation_id=settings.generation_id,
            partitions=settings.partitions if settings.partitions > 0 else None,
            doc_store_url=doc_store_url,
            function_config=settings.function,
            ledger=ledger,
        )
    except BaseException:
        for server in reversed(servers):
            server.stop()
        raise

    app = make_gateway_app(service, admin_token=settings.admin_token)
    return Deployment(
        gateway_app=app,
        service=service,
        object_store_url=object_store_url,
        doc_store_url=doc_store_url,
        servers=servers,
        clients=clients,
    )
