// Gateway base URL. One config value, overridable without a rebuild:
// a page can set window.ANLESSINI_GATEWAY before loading the app, or a
// ?gateway=http://host:port query parameter picks the target at runtime.

declare global {
  interface Window {
    ANLESSINI_GATEWAY?: string;
  }
}

const DEFAULT_PORT = 8080;

function stripTrailingSlash(url: string): string {
  return url.endsWith('/') ? url.slice(0, -1) : url;
}

export function gatewayUrl(): string {
  if (typeof window !== 'undefined' && typeof window.location !== 'undefined') {
    if (window.ANLESSINI_GATEWAY) {
      return stripTrailingSlash(window.ANLESSINI_GATEWAY);
    }
    const param = new URLSearchParams(window.location.search).get('gateway');
    if (param) {
      return stripTrailingSlash(param);
    }
    return `http://${window.location.hostname || '127.0.0.1'}:${DEFAULT_PORT}`;
  }
  return `http://127.0.0.1:${DEFAULT_PORT}`;
}
