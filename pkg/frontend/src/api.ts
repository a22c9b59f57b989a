// Typed client for the gateway HTTP API. This module never recomputes
// scores or costs; it passes gateway responses through unchanged and only
// adds the browser-side latency measurement around each fetch.

export interface SearchHit {
  docid: string;
  score: number;
  document: Record<string, unknown> | null;
}

export interface SearchResponse {
  query: string;
  k: number;
  results: SearchHit[];
  generation_id: string;
  latency_ms: number;
  cost_usd: number;
  cold: boolean;
}

export interface InstanceSummary {
  instance_id: string;
  generation_id: string;
  state: string;
  cold_start_ms: number;
  bytes_fetched: number;
  invocation_count: number;
}

export interface BillingSummary {
  invocations: number;
  total_cost_usd: number;
  cold_count: number;
  mean_duration_s: number;
  median_duration_s: number;
  p95_duration_s: number;
}

export interface MetricsResponse {
  instances: InstanceSummary[];
  billing: BillingSummary;
  qps_1m: number;
  latency_ms: { p50_ms: number; p95_ms: number };
}

export interface TimedSearch {
  response: SearchResponse;
  browserLatencyMs: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

function now(): number {
  return typeof performance !== 'undefined' ? performance.now() : Date.now();
}

async function readError(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    if (body && typeof body.error === 'string') return body.error;
  } catch {
    // not json, fall through
  }
  return `request failed with status ${resp.status}`;
}

export async function searchRequest(
  base: string,
  query: string,
  k: number,
  signal?: AbortSignal,
): Promise<TimedSearch> {
  const params = new URLSearchParams({ q: query, k: String(k) });
  const started = now();
  const resp = await fetch(`${base}/v1/search?${params}`, { signal });
  if (!resp.ok) {
    throw new ApiError(resp.status, await readError(resp));
  }
  const body = (await resp.json()) as SearchResponse;
  const browserLatencyMs = now() - started;
  return { response: body, browserLatencyMs };
}

export async function getDocument(
  base: string,
  docid: string,
): Promise<Record<string, unknown>> {
  const resp = await fetch(`${base}/v1/doc/${encodeURIComponent(docid)}`);
  if (!resp.ok) {
    throw new ApiError(resp.status, await readError(resp));
  }
  return (await resp.json()) as Record<string, unknown>;
}

export async function getMetrics(base: string): Promise<MetricsResponse> {
  const resp = await fetch(`${base}/v1/metrics`);
  if (!resp.ok) {
    throw new ApiError(resp.status, await readError(resp));
  }
  return (await resp.json()) as MetricsResponse;
}
