import { gatewayUrl } from './config.js';
import { setupApp } from './app.js';
import { startTelemetry } from './telemetry.js';

const base = gatewayUrl();
setupApp(document, base);
startTelemetry(document, base);

const target = document.getElementById('gateway-target');
if (target) target.textContent = base;
