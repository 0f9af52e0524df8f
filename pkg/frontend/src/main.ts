// Entry point. The bundle is hosted by the study service itself, so API
// calls default to the page's own origin; ?service= overrides for
// development against a separately running service.

import { ServiceClient } from './api.js';
import { SessionFlow } from './flow.js';

function param(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

async function boot(): Promise<void> {
  const container = document.getElementById('study');
  if (!container) throw new Error('missing #study container');
  const client = new ServiceClient(param('service') ?? '');

  let sessionId = param('session');
  if (!sessionId) {
    const study = param('study');
    if (!study) {
      container.textContent = 'Add ?study=<study id> to the URL to begin.';
      return;
    }
    sessionId = await client.openSession(study);
    // keep the session in the URL so a reload resumes at the server's cursor
    const url = new URL(window.location.href);
    url.searchParams.set('session', sessionId);
    window.history.replaceState(null, '', url);
  }

  const flow = new SessionFlow(client, container);
  try {
    await flow.run(sessionId);
  } catch (err) {
    container.textContent = `Something went wrong: ${err instanceof Error ? err.message : err}`;
  }
}

void boot();
