// Shared machinery for the suite: an in-memory stand-in for the study
// service, and helpers for driving widgets the way a participant would.

import type {
  AttentionSpec,
  ResponseFormat,
  ResponseSubmission,
  StepName,
  StepSpec,
  StimulusSpec,
  WidgetSpec,
} from '../src/types.js';

export const ATTENTION: AttentionSpec = {
  question: 'Which range did the observed proportion fall into? (0%-30%, 30%-60%, 60%-100%)',
  ranges: ['R0_30', 'R30_60', 'R60_100'],
};

export const STATIC_STIMULUS: StimulusSpec = {
  kind: 'static',
  proportion: 27 / 158,
  icon_unit: 600,
  grid_rows: 10,
  grid_cols: 10,
  label: '',
};

export const HOPS_STIMULUS: StimulusSpec = {
  kind: 'hops',
  frames: [0.16, 0.22, 0.12, 0.19, 0.14, 0.2, 0.11, 0.18, 0.15, 0.21, 0.13, 0.17],
  frame_duration_ms: 400,
  label: '',
};

export function widgetSpecFor(format: ResponseFormat, target: 'prior' | 'posterior'): WidgetSpec {
  switch (format) {
    case 'GraphicalSample':
      return { kind: 'IconArraySample', target, rounds: 5, grid_rows: 10, grid_cols: 10 };
    case 'TextSample':
      return { kind: 'TextSample', target, rounds: 5 };
    case 'ModeInterval':
      return { kind: 'ModeInterval', target };
    case 'Histogram':
      return { kind: 'BallsAndBins', target, bins: 20, balls: 100 };
  }
}

type MockOptions = {
  format?: ResponseFormat;
  elicited?: boolean;
  hops?: boolean;
};

/**
 * Minimal stand-in for the study service: one session, a step cursor, and
 * the same status codes the real service uses. Exposes a fetch-compatible
 * function for ServiceClient.
 */
export class MockService {
  readonly steps: StepName[];
  cursor = 0;
  submissions: ResponseSubmission[] = [];

  private format: ResponseFormat;
  private hops: boolean;

  constructor(opts: MockOptions = {}) {
    this.format = opts.format ?? 'GraphicalSample';
    this.hops = opts.hops ?? false;
    this.steps =
      opts.elicited === false
        ? ['stimulus', 'posterior', 'attention']
        : ['prior', 'stimulus', 'posterior', 'attention'];
  }

  get completed(): boolean {
    return this.cursor >= this.steps.length;
  }

  stepSpec(): StepSpec {
    const step = this.completed ? null : this.steps[this.cursor];
    return {
      session_id: 'mock-s00000',
      study_id: 'mock',
      dataset: 'TechSmall',
      condition: {
        format: this.format,
        uncertainty: this.hops ? 'Uncertainty' : 'NoUncertainty',
        elicitation: this.steps.length === 4 ? 'Elicitation' : 'NoElicitation',
      },
      step,
      step_index: this.cursor,
      step_count: this.steps.length,
      completed: this.completed,
      widget:
        step === 'prior' || step === 'posterior' ? widgetSpecFor(this.format, step) : null,
      stimulus: step === 'stimulus' ? (this.hops ? HOPS_STIMULUS : STATIC_STIMULUS) : null,
      attention: step === 'attention' ? ATTENTION : null,
    };
  }

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input, 'http://mock.test');
    if (url.pathname.endsWith('/step')) {
      return json(200, this.stepSpec());
    }
    if (url.pathname.endsWith('/responses')) {
      const submission = JSON.parse(String(init?.body)) as ResponseSubmission;
      if (this.completed) {
        return json(409, { error: { type: 'already-completed', message: 'session is complete' } });
      }
      if (submission.step !== this.steps[this.cursor]) {
        return json(409, {
          error: {
            type: 'step-mismatch',
            message: `expects step '${this.steps[this.cursor]}', got '${submission.step}'`,
          },
        });
      }
      this.submissions.push(submission);
      this.cursor += 1;
      return json(200, {
        next_step: this.completed ? null : this.steps[this.cursor],
        completed: this.completed,
      });
    }
    if (url.pathname.endsWith('/sessions')) {
      return json(201, { session_id: 'mock-s00000', study_id: 'mock' });
    }
    return json(404, { error: { type: 'unknown-study', message: `no route ${url.pathname}` } });
  };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

// ------------------------------------------------------------- DOM driving

export async function until<T>(get: () => T | null | undefined | false, label = 'condition'): Promise<T> {
  for (let i = 0; i < 600; i++) {
    const value = get();
    if (value) return value as T;
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
  throw new Error(`timed out waiting for ${label}`);
}

export function setSlider(root: ParentNode, value: number): void {
  const input = root.querySelector<HTMLInputElement>('.percent-slider input[type=range]');
  if (!input) throw new Error('no slider found');
  input.value = String(value);
  input.dispatchEvent(new Event('input', { bubbles: true }));
}

export function setNumberEntry(input: HTMLInputElement, value: number | ''): void {
  input.value = String(value);
  input.dispatchEvent(new Event('input', { bubbles: true }));
}

export function clickButton(root: ParentNode, label: string): void {
  const buttons = Array.from(root.querySelectorAll('button'));
  const match = buttons.find((b) => b.textContent === label);
  if (!match) throw new Error(`no button labeled ${label}`);
  if (match.disabled) throw new Error(`button ${label} is disabled`);
  match.click();
}

/** Record a full set of icon-array rounds: click circle k, set confidence, record. */
export function recordIconRounds(root: ParentNode, picks: number[], confidences: number[]): void {
  picks.forEach((k, i) => {
    const cell = root.querySelector<HTMLButtonElement>(`[data-value="${k}"]`);
    if (!cell) throw new Error(`no grid cell ${k}`);
    cell.click();
    setSlider(root, confidences[i]);
    clickButton(root, 'Record this value');
  });
}

export function recordTextRounds(root: ParentNode, percents: number[], confidences: number[]): void {
  const entry = root.querySelector<HTMLInputElement>('input[type=number]');
  if (!entry) throw new Error('no numeric entry');
  percents.forEach((p, i) => {
    setNumberEntry(entry, p);
    setSlider(root, confidences[i]);
    clickButton(root, 'Record this value');
  });
}
