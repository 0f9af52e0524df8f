// Sample elicitation by typing percentages.

import { el } from '../controls.js';
import type { SamplesPayload, WidgetSpec } from '../types.js';
import { RoundRecorder } from './rounds.js';

export class TextSampleWidget {
  readonly root: HTMLElement;
  readonly rounds: RoundRecorder;
  readonly entry: HTMLInputElement;

  constructor(spec: WidgetSpec, onSubmit?: (payload: SamplesPayload) => void) {
    this.root = el('div', 'text-sample');
    if (spec.copy) this.root.appendChild(el('p', 'widget-copy', spec.copy));

    const label = el('label', 'text-sample-entry', 'Your value (0-100%):');
    this.entry = document.createElement('input');
    this.entry.type = 'number';
    this.entry.min = '0';
    this.entry.max = '100';
    this.entry.step = 'any';
    label.appendChild(this.entry);
    this.root.appendChild(label);

    this.rounds = new RoundRecorder(
      spec.rounds ?? 5,
      {
        currentSample: () => this.currentSample(),
        resetPicker: () => {
          this.entry.value = '';
        },
      },
      onSubmit,
    );
    this.root.appendChild(this.rounds.root);
    this.entry.addEventListener('input', () => this.rounds.refresh());
  }

  private currentSample(): number | null {
    if (this.entry.value.trim() === '') return null;
    const percent = Number(this.entry.value);
    if (!Number.isFinite(percent) || percent < 0 || percent > 100) return null;
    return percent / 100;
  }

  payload(): SamplesPayload | null {
    return this.rounds.payload();
  }
}
