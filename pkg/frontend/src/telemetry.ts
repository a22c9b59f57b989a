// Telemetry panel: polls /v1/metrics and renders instance state, the
// cumulative cost, and a running queries-per-dollar figure next to the
// 100,000-per-dollar reference the cost model is anchored to.

import { BillingSummary, getMetrics, MetricsResponse } from './api.js';
import { formatUsd } from './app.js';

export const REFERENCE_QUERIES_PER_DOLLAR = 100_000;

export function queriesPerDollar(billing: BillingSummary): number | null {
  if (billing.total_cost_usd <= 0 || billing.invocations === 0) return null;
  return billing.invocations / billing.total_cost_usd;
}

export function renderTelemetry(doc: Document, metrics: MetricsResponse): void {
  const panel = doc.getElementById('telemetry');
  if (!panel) throw new Error('missing element #telemetry');
  panel.textContent = '';

  const cost = doc.createElement('div');
  cost.id = 'telemetry-cost';
  cost.textContent =
    `invocations ${metrics.billing.invocations} | ` +
    `total ${formatUsd(metrics.billing.total_cost_usd)} | ` +
    `cold ${metrics.billing.cold_count}`;
  panel.appendChild(cost);

  const qpd = doc.createElement('div');
  qpd.id = 'telemetry-qpd';
  const rate = queriesPerDollar(metrics.billing);
  qpd.textContent = rate === null
    ? `queries/$: n/a (reference ${REFERENCE_QUERIES_PER_DOLLAR.toLocaleString('en-US')}/$)`
    : `queries/$: ${Math.round(rate).toLocaleString('en-US')} ` +
      `(reference ${REFERENCE_QUERIES_PER_DOLLAR.toLocaleString('en-US')}/$)`;
  panel.appendChild(qpd);

  const latency = doc.createElement('div');
  latency.id = 'telemetry-latency';
  latency.textContent =
    `p50 ${metrics.latency_ms.p50_ms.toFixed(1)} ms | ` +
    `p95 ${metrics.latency_ms.p95_ms.toFixed(1)} ms | ` +
    `${metrics.qps_1m.toFixed(2)} qps`;
  panel.appendChild(latency);

  const list = doc.createElement('ul');
  list.id = 'telemetry-instances';
  if (metrics.instances.length === 0) {
    const li = doc.createElement('li');
    li.textContent = 'no instances provisioned';
    list.appendChild(li);
  }
  for (const inst of metrics.instances) {
    const li = doc.createElement('li');
    li.textContent =
      `${inst.instance_id} [${inst.state}] gen ${inst.generation_id} | ` +
      `${inst.invocation_count} invocations | ` +
      `${inst.bytes_fetched} bytes cached | ` +
      `cold start ${inst.cold_start_ms.toFixed(1)} ms`;
    list.appendChild(li);
  }
  panel.appendChild(list);
}

export interface TelemetryHandle {
  tick(): Promise<void>;
  stop(): void;
}

export function startTelemetry(
  doc: Document,
  base: string,
  intervalMs = 2000,
): TelemetryHandle {
  let timer: ReturnType<typeof setInterval> | null = null;

  async function tick(): Promise<void> {
    try {
      renderTelemetry(doc, await getMetrics(base));
    } catch {
      const panel = doc.getElementById('telemetry');
      if (panel) panel.textContent = 'metrics unavailable';
    }
  }

  timer = setInterval(() => void tick(), intervalMs);
  void tick();
  return {
    tick,
    stop() {
      if (timer !== null) clearInterval(timer);
      timer = null;
    },
  };
}
