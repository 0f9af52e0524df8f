// Shared machinery for the two sample-based widgets: a fixed number of
// rounds, each pairing one sample with a confidence, recorded rounds listed
// for review, and submission only once every round is recorded.

import { PercentSlider, button, el } from '../controls.js';
import type { SamplesPayload } from '../types.js';

export type Round = { sample: number; confidence: number };

export class RoundRecorder {
  readonly root: HTMLElement;
  readonly confidence: PercentSlider;
  readonly recordButton: HTMLButtonElement;
  readonly submitButton: HTMLButtonElement;
  readonly rounds: Round[] = [];

  private status: HTMLElement;
  private review: HTMLOListElement;

  constructor(
    readonly roundCount: number,
    private picker: { currentSample(): number | null; resetPicker(): void },
    onSubmit?: (payload: SamplesPayload) => void,
  ) {
    this.root = el('div', 'rounds');
    this.status = el('p', 'rounds-status');
    this.confidence = new PercentSlider('How confident are you in this value?');
    this.review = document.createElement('ol');
    this.review.className = 'rounds-review';
    this.recordButton = button('Record this value', () => this.record());
    this.submitButton = button('Submit', () => {
      const payload = this.payload();
      if (payload && onSubmit) onSubmit(payload);
    });
    this.root.append(this.status, this.confidence.root, this.recordButton, this.review, this.submitButton);
    this.refresh();
  }

  /** Call whenever the picker's current sample may have changed. */
  refresh(): void {
    const done = this.rounds.length >= this.roundCount;
    this.status.textContent = done
      ? 'All values recorded. Review them below, then submit.'
      : `Value ${this.rounds.length + 1} of ${this.roundCount}`;
    this.recordButton.disabled = done || this.picker.currentSample() === null;
    this.submitButton.disabled = !done;
  }

  private record(): void {
    const sample = this.picker.currentSample();
    if (sample === null || this.rounds.length >= this.roundCount) return;
    const confidence = this.confidence.value();
    this.rounds.push({ sample, confidence });
    const item = document.createElement('li');
    item.textContent = `${Math.round(sample * 100)}% at confidence ${confidence}`;
    this.review.appendChild(item);
    this.picker.resetPicker();
    this.confidence.reset(50);
    this.refresh();
  }

  payload(): SamplesPayload | null {
    if (this.rounds.length === 0) return null;
    return {
      kind: 'samples',
      samples: this.rounds.map((r) => r.sample),
      confidences: this.rounds.map((r) => r.confidence),
    };
  }
}
