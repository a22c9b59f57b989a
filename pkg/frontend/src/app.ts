// Search page wiring: one query box, ranked results, a raw-document pane
// and a session history table. All numbers shown come from the gateway.

import { ApiError, getDocument, searchRequest, SearchResponse } from './api.js';

export interface HistoryEntry {
  query: string;
  serverLatencyMs: number;
  browserLatencyMs: number;
  costUsd: number;
  cold: boolean;
}

export interface AppController {
  submit(query: string, k: number): Promise<void>;
  viewDocument(docid: string): Promise<void>;
  readonly history: readonly HistoryEntry[];
}

export function excerpt(text: string, limit = 160): string {
  if (text.length <= limit) return text;
  return text.slice(0, limit - 1).trimEnd() + '…';
}

export function formatUsd(x: number): string {
  return '$' + x.toExponential(3);
}

export function setupApp(doc: Document, base: string): AppController {
  const byId = <T extends HTMLElement>(id: string): T => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as T;
  };

  const form = byId<HTMLFormElement>('search-form');
  const input = byId<HTMLInputElement>('query');
  const kInput = byId<HTMLInputElement>('k');
  const message = byId<HTMLElement>('message');
  const summary = byId<HTMLElement>('summary');
  const resultsEl = byId<HTMLElement>('results');
  const detail = byId<HTMLElement>('doc-detail');
  const historyBody = byId<HTMLElement>('history-body');

  const history: HistoryEntry[] = [];
  // at most one in-flight search; a newer submission cancels the older one
  let inflight: AbortController | null = null;

  function setMessage(text: string, retry?: () => void): void {
    message.textContent = text;
    if (retry) {
      const button = doc.createElement('button');
      button.textContent = 'retry';
      button.addEventListener('click', retry);
      message.append(' ');
      message.append(button);
    }
  }

  function renderResults(resp: SearchResponse, browserLatencyMs: number): void {
    summary.textContent =
      `${resp.results.length} results | generation ${resp.generation_id} | ` +
      `${resp.cold ? 'cold' : 'warm'} | server ${resp.latency_ms.toFixed(1)} ms | ` +
      `browser ${browserLatencyMs.toFixed(1)} ms | ${formatUsd(resp.cost_usd)}`;

    resultsEl.textContent = '';
    if (resp.results.length === 0) {
      resultsEl.textContent = 'no matches';
      return;
    }
    for (const hit of resp.results) {
      const row = doc.createElement('div');
      row.className = 'result-row';

      const head = doc.createElement('div');
      head.className = 'result-head';
      head.textContent = `${hit.docid}  (${hit.score.toFixed(4)})`;
      head.addEventListener('click', () => void controller.viewDocument(hit.docid));
      row.appendChild(head);

      const body = doc.createElement('div');
      body.className = 'result-excerpt';
      const contents = hit.document && typeof hit.document['contents'] === 'string'
        ? (hit.document['contents'] as string)
        : null;
      body.textContent = contents !== null ? excerpt(contents) : '[document unavailable]';
      row.appendChild(body);

      resultsEl.appendChild(row);
    }
  }

  function renderHistory(): void {
    historyBody.textContent = '';
    for (const entry of history) {
      const tr = doc.createElement('tr');
      const cells = [
        entry.query,
        entry.serverLatencyMs.toFixed(1),
        entry.browserLatencyMs.toFixed(1),
        formatUsd(entry.costUsd),
        entry.cold ? 'cold' : 'warm',
      ];
      for (const text of cells) {
        const td = doc.createElement('td');
        td.textContent = text;
        tr.appendChild(td);
      }
      historyBody.appendChild(tr);
    }
  }

  const controller: AppController = {
    history,

    async submit(query: string, k: number): Promise<void> {
      const trimmed = query.trim();
      if (!trimmed) {
        setMessage('type a query first');
        return;
      }
      inflight?.abort();
      const aborter = new AbortController();
      inflight = aborter;
      setMessage('searching...');
      try {
        const timed = await searchRequest(base, trimmed, k, aborter.signal);
        if (aborter.signal.aborted) return; // superseded mid-parse
        setMessage('');
        renderResults(timed.response, timed.browserLatencyMs);
        history.push({
          query: trimmed,
          serverLatencyMs: timed.response.latency_ms,
          browserLatencyMs: timed.browserLatencyMs,
          costUsd: timed.response.cost_usd,
          cold: timed.response.cold,
        });
        renderHistory();
      } catch (err) {
        if (aborter.signal.aborted) return; // cancelled by a newer query
        if (err instanceof ApiError && err.status < 500) {
          setMessage(err.message);
        } else {
          const text = err instanceof ApiError ? err.message : 'gateway unreachable';
          setMessage(text, () => void controller.submit(trimmed, k));
        }
      } finally {
        if (inflight === aborter) inflight = null;
      }
    },

    async viewDocument(docid: string): Promise<void> {
      detail.textContent = 'loading...';
      try {
        const payload = await getDocument(base, docid);
        detail.textContent = JSON.stringify(payload, null, 2);
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) {
          detail.textContent = `document ${docid} missing`;
        } else {
          detail.textContent = 'failed to load document';
        }
      }
    },
  };

  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const k = parseInt(kInput.value, 10) || 10;
    void controller.submit(input.value, k);
  });

  return controller;
}
