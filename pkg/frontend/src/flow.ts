// Guided session controller. The server's step cursor is the only source of
// truth: every view renders from a fresh step spec, submissions go straight
// to the service, and a step-mismatch simply re-fetches and re-renders.
// Nothing a participant enters is kept client-side beyond the mounted step.

import { ApiError, ServiceClient } from './api.js';
import { AttentionWidget } from './attention.js';
import { el } from './controls.js';
import { HopsPlayer, Scheduler, StaticIconArray } from './stimulus.js';
import type { BeliefPayload, StepName, StepSpec, SubmissionPayload } from './types.js';
import { validateBelief } from './validate.js';
import { BallsAndBinsWidget } from './widgets/ballsAndBins.js';
import { IconArraySampleWidget } from './widgets/iconArraySample.js';
import { ModeIntervalWidget } from './widgets/modeInterval.js';
import { TextSampleWidget } from './widgets/textSample.js';

const STEP_TITLES: Record<StepName, string> = {
  prior: 'What do you believe?',
  stimulus: 'The observed data',
  posterior: 'What do you believe now?',
  attention: 'One last question',
};

const wallClock: Scheduler = {
  now: () => performance.now(),
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

export class SessionFlow {
  private scheduler: Scheduler;

  constructor(
    private client: ServiceClient,
    readonly container: HTMLElement,
    opts: { scheduler?: Scheduler } = {},
  ) {
    this.scheduler = opts.scheduler ?? wallClock;
  }

  async run(sessionId: string): Promise<void> {
    for (;;) {
      const spec = await this.client.getStep(sessionId);
      if (spec.completed || spec.step === null) {
        this.renderCompleted();
        return;
      }
      await this.renderStep(sessionId, spec);
      // loop re-fetches: after a successful submit this advances, after a
      // step-mismatch it resets the view to the server's cursor
    }
  }

  private renderCompleted(): void {
    this.container.replaceChildren(
      el('h2', 'flow-title', 'All done'),
      el('p', 'flow-complete', 'Your responses have been recorded. Thank you!'),
    );
  }

  private renderStep(sessionId: string, spec: StepSpec): Promise<void> {
    const step = spec.step as StepName;
    this.container.replaceChildren();
    this.container.appendChild(
      el('p', 'flow-progress', `Step ${spec.step_index + 1} of ${spec.step_count}`),
    );
    this.container.appendChild(el('h2', 'flow-title', STEP_TITLES[step]));
    const errorArea = el('p', 'flow-error');
    let stopPlayback = () => {};

    return new Promise((resolve) => {
      const send = async (payload: SubmissionPayload) => {
        try {
          await this.client.submit(sessionId, { step, payload });
          stopPlayback();
          resolve();
        } catch (err) {
          if (err instanceof ApiError && err.status === 409) {
            stopPlayback();
            resolve();
            return;
          }
          errorArea.textContent = err instanceof Error ? err.message : String(err);
        }
      };
      const sendBelief = (payload: BeliefPayload) => {
        const problems = validateBelief(payload);
        if (problems.length > 0) {
          errorArea.textContent = problems.join('; ');
          return;
        }
        void send(payload);
      };

      if (step === 'prior' || step === 'posterior') {
        if (!spec.widget) throw new Error(`step ${step} arrived without a widget spec`);
        const widget = this.buildWidget(spec, sendBelief);
        this.container.appendChild(widget);
      } else if (step === 'stimulus') {
        if (!spec.stimulus) throw new Error('stimulus step arrived without a stimulus spec');
        const shownAt = this.scheduler.now();
        if (spec.stimulus.kind === 'hops') {
          const player = new HopsPlayer(spec.stimulus, { scheduler: this.scheduler });
          this.container.appendChild(player.root);
          player.start();
          stopPlayback = () => player.stop();
        } else {
          this.container.appendChild(new StaticIconArray(spec.stimulus).root);
        }
        const advance = el('button', 'stimulus-continue', 'Continue');
        advance.addEventListener('click', () => {
          void send({ dwell_ms: this.scheduler.now() - shownAt });
        });
        this.container.appendChild(advance);
      } else {
        if (!spec.attention) throw new Error('attention step arrived without its spec');
        this.container.appendChild(new AttentionWidget(spec.attention, (a) => void send(a)).root);
      }
      this.container.appendChild(errorArea);
    });
  }

  private buildWidget(spec: StepSpec, onSubmit: (payload: BeliefPayload) => void): HTMLElement {
    const widget = spec.widget!;
    switch (widget.kind) {
      case 'IconArraySample':
        return new IconArraySampleWidget(widget, onSubmit).root;
      case 'TextSample':
        return new TextSampleWidget(widget, onSubmit).root;
      case 'ModeInterval':
        return new ModeIntervalWidget(widget, onSubmit).root;
      case 'BallsAndBins':
        return new BallsAndBinsWidget(widget, onSubmit).root;
    }
  }
}
