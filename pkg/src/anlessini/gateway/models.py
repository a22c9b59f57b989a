"""Request/response shapes for the REST front door."""

from __future__ import annotations

from pydantic import BaseModel, Field


class SearchHit(BaseModel):
    docid: str
    score: float
    document: dict | None = None


class SearchResponse(BaseModel):
    query: str
    k: int
    results: list[SearchHit]
    generation_id: str
    latency_ms: float = Field(description="gateway-measured end to end")
    cost_usd: float = Field(description="sum of this request's billing records")
    cold: bool = Field(description="true when any involved instance cold-started")


class SwapRequest(BaseModel):
    generation_id: str = Field(min_length=1)


class SwapResponse(BaseModel):
    accepted: bool
    previous: str
    target: str


class PoolStatus(BaseModel):
    name: str
    target_generation: str
    provisioning: int
    instances: list[dict]


class StatusResponse(BaseModel):
    partitions: int
    target_generation: str
    current_generations: list[str]
    draining: bool
    pools: list[PoolStatus]


class LatencySummary(BaseModel):
    p50_ms: float
    p95_ms: float


class MetricsResponse(BaseModel):
    instances: list[dict]
    billing: dict
    qps_1m: float
    latency_ms: LatencySummary
