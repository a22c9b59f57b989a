// @vitest-environment happy-dom
import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import type { MetricsResponse } from '../src/api.js';
import {
  queriesPerDollar,
  REFERENCE_QUERIES_PER_DOLLAR,
  renderTelemetry,
  startTelemetry,
} from '../src/telemetry.js';

function metrics(overrides: Partial<MetricsResponse> = {}): MetricsResponse {
  return {
    instances: [],
    billing: {
      invocations: 0, total_cost_usd: 0, cold_count: 0,
      mean_duration_s: 0, median_duration_s: 0, p95_duration_s: 0,
    },
    qps_1m: 0,
    latency_ms: { p50_ms: 0, p95_ms: 0 },
    ...overrides,
  };
}

beforeEach(() => {
  document.body.innerHTML = '<div id="telemetry"></div>';
});

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('queriesPerDollar', () => {
  it('is null before any spend', () => {
    expect(queriesPerDollar(metrics().billing)).toBeNull();
  });

  it('divides gateway-reported figures', () => {
    const billing = { ...metrics().billing, invocations: 100, total_cost_usd: 1e-3 };
    expect(queriesPerDollar(billing)).toBeCloseTo(100_000, 6);
  });

  it('the reference figure matches the cost model round number', () => {
    expect(REFERENCE_QUERIES_PER_DOLLAR).toBe(100_000);
  });
});

describe('renderTelemetry', () => {
  it('shows an empty pool on fresh boot', () => {
    renderTelemetry(document, metrics());
    const panel = document.getElementById('telemetry')!;
    expect(panel.textContent).toContain('invocations 0');
    expect(panel.textContent).toContain('no instances provisioned');
    expect(panel.textContent).toContain('queries/$: n/a');
    expect(panel.textContent).toContain('100,000');
  });

  it('lists instances with their state', () => {
    renderTelemetry(document, metrics({
      instances: [{
        instance_id: 'part-0-inst-1', generation_id: 'g1', state: 'WARM',
        cold_start_ms: 41.5, bytes_fetched: 123456, invocation_count: 7,
      }],
      billing: {
        invocations: 7, total_cost_usd: 7.00014e-5, cold_count: 1,
        mean_duration_s: 0.3, median_duration_s: 0.3, p95_duration_s: 0.3,
      },
      qps_1m: 0.5,
      latency_ms: { p50_ms: 4.2, p95_ms: 9.9 },
    }));
    const panel = document.getElementById('telemetry')!;
    expect(panel.querySelectorAll('#telemetry-instances li').length).toBe(1);
    expect(panel.textContent).toContain('part-0-inst-1 [WARM] gen g1');
    expect(panel.textContent).toContain('123456 bytes cached');
    // 7 / 7.00014e-5 rounds to the reference figure
    expect(panel.querySelector('#telemetry-qpd')!.textContent).toContain('99,998');
    expect(panel.textContent).toContain('p95 9.9 ms');
  });

  it('renders every number from the gateway payload, not recomputed', () => {
    // a deliberately inconsistent payload must be displayed verbatim:
    // the panel is render-only and must not correct it
    renderTelemetry(document, metrics({
      billing: {
        invocations: 10, total_cost_usd: 1.0, cold_count: 99,
        mean_duration_s: 0, median_duration_s: 0, p95_duration_s: 0,
      },
    }));
    const panel = document.getElementById('telemetry')!;
    expect(panel.textContent).toContain('cold 99');
    expect(panel.querySelector('#telemetry-qpd')!.textContent).toContain('queries/$: 10');
  });
});

describe('startTelemetry', () => {
  it('polls and renders on tick', async () => {
    vi.stubGlobal('fetch', vi.fn(async () => new Response(
      JSON.stringify(metrics({ qps_1m: 1.25 })),
      { status: 200, headers: { 'content-type': 'application/json' } })));

    const handle = startTelemetry(document, 'http://gw', 60_000);
    await handle.tick();
    handle.stop();
    expect(document.getElementById('telemetry')!.textContent).toContain('1.25 qps');
  });

  it('degrades to a placeholder when metrics are unreachable', async () => {
    vi.stubGlobal('fetch', vi.fn(async () => {
      throw new TypeError('fetch failed');
    }));

    const handle = startTelemetry(document, 'http://gw', 60_000);
    await handle.tick();
    handle.stop();
    expect(document.getElementById('telemetry')!.textContent).toBe('metrics unavailable');
  });
});
