"""Function and pool configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

# published per-GB-second rate; the cost arithmetic depends on this exact value
DEFAULT_RATE_USD_PER_GB_S = 0.000016667

DEFAULT_MEMORY_GB = 2.0
DEFAULT_MAX_INSTANCES = 8
DEFAULT_IDLE_TTL_S = 300.0


@dataclass
class FunctionConfig:
    """Per-pool function settings.

    ``index_prefix`` documents where the pool's segment lives (bucket and
    key prefix); the actual byte access is through a directory factory so
    pools run identically over local directories in tests.
    """

    index_prefix: str = ""
    generation_id: str = ""
    memory_gb: float = DEFAULT_MEMORY_GB
    max_instances: int = DEFAULT_MAX_INSTANCES
    idle_ttl_s: float = DEFAULT_IDLE_TTL_S
    rate_usd_per_gb_s: float = DEFAULT_RATE_USD_PER_GB_S
    queue_timeout_s: float = 10.0
    instance_floor: int = 0
    bill_cold_start: bool = True

    def __post_init__(self) -> None:
        if self.memory_gb <= 0:
            raise ValueError(f"memory_gb must be positive, got {self.memory_gb}")
        if self.max_instances < 1:
            raise ValueError(f"max_instances must be >= 1, got {self.max_instances}")
        if self.idle_ttl_s <= 0:
            raise ValueError(f"idle_ttl_s must be positive, got {self.idle_ttl_s}")
        if self.rate_usd_per_gb_s <= 0:
            raise ValueError("rate_usd_per_gb_s must be positive")
        if self.instance_floor < 0:
            raise ValueError("instance_floor must be >= 0")


@dataclass
class ServeSettings:
    """Whole-deployment settings for the serving CLI; JSON file fields,
    each overridable by a command-line flag."""

    object_store_url: str | None = None
    doc_store_url: str | None = None
    bucket: str = "anlessini"
    prefix: str = "idx"
    generation_id: str = ""
    partitions: int = 0  # 0 = discover from the generation's topology.json
    listen: str = "127.0.0.1:8080"
    admin_token: str | None = None
    data_dir: str = "./anlessini-data"
    ledger_path: str | None = None
    function: FunctionConfig = field(default_factory=FunctionConfig)


def load_serve_settings(path: str | Path) -> ServeSettings:
    doc = json.loads(Path(path).read_text("utf-8"))
    func_doc = doc.pop("function", {})
    known = {k: v for k, v in doc.items() if k in ServeSettings.__dataclass_fields__}
    unknown = set(doc) - set(known)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    func_known = {
        k: v for k, v in func_doc.items() if k in FunctionConfig.__dataclass_fields__
    }
    func_unknown = set(func_doc) - set(func_known)
    if func_unknown:
        raise ValueError(f"unknown function config keys: {sorted(func_unknown)}")
    return ServeSettings(function=FunctionConfig(**func_known), **known)
