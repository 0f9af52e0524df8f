// HTTP client for the study service. The UI talks to the service through
// this class only; no state beyond the base URL lives here.

import type { ResponseSubmission, StepSpec, SubmitResult } from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly type: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asError(response: Response): Promise<ApiError> {
  let type = 'unknown';
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body && body.error) {
      type = String(body.error.type);
      message = String(body.error.message);
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, type, message);
}

export class ServiceClient {
  private fetchImpl: FetchLike;

  constructor(
    public readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await asError(response);
    return response;
  }

  async openSession(studyId: string, participantId?: string): Promise<string> {
    const body = participantId === undefined ? {} : { participant_id: participantId };
    const response = await this.request(`/studies/${encodeURIComponent(studyId)}/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    const opened = await response.json();
    return String(opened.session_id);
  }

  async getStep(sessionId: string): Promise<StepSpec> {
    const response = await this.request(`/sessions/${encodeURIComponent(sessionId)}/step`);
    return (await response.json()) as StepSpec;
  }

  async submit(sessionId: string, submission: ResponseSubmission): Promise<SubmitResult> {
    const response = await this.request(`/sessions/${encodeURIComponent(sessionId)}/responses`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(submission),
    });
    return (await response.json()) as SubmitResult;
  }
}
