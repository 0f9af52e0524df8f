// Mode plus interval elicitation: the participant names the most likely
// value, sees the band from 25% below to 25% above it, and rates the chance
// the true value falls inside that band.

import { PercentSlider, button, el } from '../controls.js';
import type { ModeIntervalPayload, WidgetSpec } from '../types.js';

function formatPercent(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return `${rounded}%`;
}

/** The band around a mode given in percent, clipped to [0, 100]. */
export function intervalAround(modePercent: number): [number, number] {
  return [Math.max(0, 0.75 * modePercent), Math.min(100, 1.25 * modePercent)];
}

export class ModeIntervalWidget {
  readonly root: HTMLElement;
  readonly modeEntry: HTMLInputElement;
  readonly intervalText: HTMLElement;
  readonly probability: PercentSlider;
  readonly submitButton: HTMLButtonElement;

  constructor(spec: WidgetSpec, onSubmit?: (payload: ModeIntervalPayload) => void) {
    this.root = el('div', 'mode-interval');
    if (spec.copy) this.root.appendChild(el('p', 'widget-copy', spec.copy));

    const label = el('label', 'mode-entry', 'Most likely value (0-100%):');
    this.modeEntry = document.createElement('input');
    this.modeEntry.type = 'number';
    this.modeEntry.min = '0';
    this.modeEntry.max = '100';
    this.modeEntry.step = 'any';
    label.appendChild(this.modeEntry);
    this.root.appendChild(label);

    this.intervalText = el('p', 'mode-interval-range', 'Enter a value to see its range.');
    this.root.appendChild(this.intervalText);

    this.probability = new PercentSlider('Chance (0-100%) the true value falls in this range:');
    this.root.appendChild(this.probability.root);

    this.submitButton = button('Submit', () => {
      const payload = this.payload();
      if (payload && onSubmit) onSubmit(payload);
    });
    this.root.appendChild(this.submitButton);

    this.modeEntry.addEventListener('input', () => this.refresh());
    this.refresh();
  }

  private modePercent(): number | null {
    if (this.modeEntry.value.trim() === '') return null;
    const percent = Number(this.modeEntry.value);
    if (!Number.isFinite(percent) || percent <= 0 || percent >= 100) return null;
    return percent;
  }

  private refresh(): void {
    const mode = this.modePercent();
    if (mode === null) {
      this.intervalText.textContent = 'Enter a value strictly between 0% and 100%.';
      this.submitButton.disabled = true;
      return;
    }
    const [lo, hi] = intervalAround(mode);
    this.intervalText.textContent = `[${formatPercent(lo)}, ${formatPercent(hi)}]`;
    this.submitButton.disabled = false;
  }

  payload(): ModeIntervalPayload | null {
    const mode = this.modePercent();
    if (mode === null) return null;
    return {
      kind: 'mode_interval',
      mode: mode / 100,
      subjective_probability: this.probability.value() / 100,
    };
  }
}
