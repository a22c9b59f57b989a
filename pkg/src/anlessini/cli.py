"""Command-line entry points.

``serve`` boots a search node (embedding the object and doc stores when
no URLs are given), ``index`` and ``load-docs`` are the offline batch
path, and ``object-store`` / ``doc-store`` run each store standalone so
the pieces can live on different machines.
"""

from __future__ import annotations

import dataclasses
import json
import logging

import click
import uvicorn

from .boot import boot_deployment
from .docstore import DocLog
from .docstore import make_app as make_docstore_app
from .errors import AnlessiniError
from .hosting import parse_listen
from .indexer import FORMATS, build, load_docs
from .objstore import BlobStore
from .objstore import make_app as make_objstore_app
from .runtime.config import ServeSettings, load_serve_settings


@click.group()
def main() -> None:
    """Serverless-style search stack, desk scale."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    # httpx logs every request at INFO; bulk loads would print one line per document
    logging.getLogger("httpx").setLevel(logging.WARNING)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--object-store-url", default=None, help="Use an already-running object store.")
@click.option("--doc-store-url", default=None, help="Use an already-running doc store.")
@click.option("--listen", default=None, help="Gateway bind address, host:port.")
@click.option("--partitions", type=int, default=None, help="Partition count (default: from topology.json).")
@click.option("--admin-token", default=None, help="Require this bearer token on admin routes.")
@click.option("--bucket", default=None)
@click.option("--prefix", default=None)
@click.option("--generation", "generation_id", default=None)
@click.option("--data-dir", default=None, help="State root for embedded stores.")
def serve(
    config_path: str | None,
    object_store_url: str | None,
    doc_store_url: str | None,
    listen: str | None,
    partitions: int | None,
    admin_token: str | None,
    bucket: str | None,
    prefix: str | None,
    generation_id: str | None,
    data_dir: str | None,
) -> None:
    """Boot the full node: stores (embedded or remote), pools, gateway."""
    settings = load_serve_settings(config_path) if config_path else ServeSettings()
    overrides = {
        "object_store_url": object_store_url,
        "doc_store_url": doc_store_url,
        "listen": listen,
        "partitions": partitions,
        "admin_token": admin_token,
        "bucket": bucket,
        "prefix": prefix,
        "generation_id": generation_id,
        "data_dir": data_dir,
    }
    for field, value in overrides.items():
        if value is not None:
            settings = dataclasses.replace(settings, **{field: value})
    if not settings.generation_id:
        raise click.ClickException(
            "a generation id is required (config generation_id or --generation)"
        )

    try:
        deployment = boot_deployment(settings)
    except AnlessiniError as e:
        raise click.ClickException(str(e)) from e
    host, port = parse_listen(settings.listen)
    click.echo(f"object store: {deployment.object_store_url}")
    click.echo(f"doc store:    {deployment.doc_store_url}")
    click.echo(f"gateway:      http://{host}:{port}")
    try:
        uvicorn.run(deployment.gateway_app, host=host, port=port, log_level="info")
    finally:
        deployment.stop()


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="jsonl")
@click.option("--partitions", type=int, default=1)
@click.option("--generation", "generation_id", required=True)
@click.option("--output", required=True, help="obj://bucket/prefix or a local directory.")
@click.option("--object-store-url", default=None, help="Where to upload obj:// output.")
def index(
    input_path: str,
    fmt: str,
    partitions: int,
    generation_id: str,
    output: str,
    object_store_url: str | None,
) -> None:
    """Build a partitioned generation from a corpus file."""
    try:
        summary = build(
            input_path, fmt, partitions, output, generation_id,
            object_store_url=object_store_url,
        )
    except AnlessiniError as e:
        raise click.ClickException(str(e)) from e
    click.echo(f"generation {summary['generation_id']}: {summary['doc_count']} docs "
               f"in {summary['partitions']} partition(s)")
    for part in summary["per_partition"]:
        click.echo(f"  part-{part['partition']}: {part['docs']} docs, {part['bytes']} bytes")
    click.echo(f"total {summary['total_bytes']} bytes -> {summary['output']} "
               f"({summary['elapsed_s']:.2f}s)")


@main.command("load-docs")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="jsonl")
@click.option("--doc-store-url", required=True)
@click.option("--sample-rate", type=float, default=0.01, help="Readback verification fraction.")
def load_docs_cmd(input_path: str, fmt: str, doc_store_url: str, sample_rate: float) -> None:
    """Bulk-load raw documents into the doc store."""
    try:
        summary = load_docs(input_path, fmt, doc_store_url, sample_rate=sample_rate)
    except AnlessiniError as e:
        raise click.ClickException(str(e)) from e
    click.echo(json.dumps(summary))


@main.command("object-store")
@click.option("--listen", default="127.0.0.1:9000")
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
def object_store_cmd(listen: str, data_dir: str) -> None:
    """Run the blob store standalone."""
    host, port = parse_listen(listen)
    uvicorn.run(make_objstore_app(BlobStore(data_dir)), host=host, port=port, log_level="info")


@main.command("doc-store")
@click.option("--listen", default="127.0.0.1:9100")
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
def doc_store_cmd(listen: str, data_dir: str) -> None:
    """Run the document store standalone."""
    from pathlib import Path

    host, port = parse_listen(listen)
    log = DocLog(Path(data_dir) / "docs.jsonl")
    uvicorn.run(make_docstore_app(log), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
