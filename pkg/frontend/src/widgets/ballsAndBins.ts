// Histogram elicitation: distribute exactly the given number of balls over
// the value bins. The submit button stays disabled at any other total.

import { button, el } from '../controls.js';
import type { HistogramPayload, WidgetSpec } from '../types.js';

export class BallsAndBinsWidget {
  readonly root: HTMLElement;
  readonly counts: number[];
  readonly counter: HTMLElement;
  readonly submitButton: HTMLButtonElement;
  readonly addButtons: HTMLButtonElement[] = [];
  readonly removeButtons: HTMLButtonElement[] = [];

  private countLabels: HTMLElement[] = [];
  private ballBudget: number;

  constructor(spec: WidgetSpec, onSubmit?: (payload: HistogramPayload) => void) {
    const bins = spec.bins ?? 20;
    this.ballBudget = spec.balls ?? 100;
    this.counts = new Array(bins).fill(0);
    this.root = el('div', 'balls-and-bins');
    if (spec.copy) this.root.appendChild(el('p', 'widget-copy', spec.copy));

    const binWidth = 100 / bins;
    const row = el('div', 'bins-row');
    row.style.display = 'grid';
    row.style.gridTemplateColumns = `repeat(${bins}, 1fr)`;
    for (let i = 0; i < bins; i++) {
      const column = el('div', 'bin');
      const count = el('div', 'bin-count', '0');
      this.countLabels.push(count);
      const add = button('+', () => this.adjust(i, 1));
      add.setAttribute('aria-label', `add ball to bin ${i}`);
      const remove = button('−', () => this.adjust(i, -1));
      remove.setAttribute('aria-label', `remove ball from bin ${i}`);
      this.addButtons.push(add);
      this.removeButtons.push(remove);
      const lo = Math.round(i * binWidth);
      const hi = Math.round((i + 1) * binWidth);
      column.append(count, add, remove, el('div', 'bin-label', `${lo}-${hi}%`));
      row.appendChild(column);
    }
    this.root.appendChild(row);

    this.counter = el('p', 'balls-counter');
    this.root.appendChild(this.counter);

    this.submitButton = button('Submit', () => {
      const payload = this.payload();
      if (payload && onSubmit) onSubmit(payload);
    });
    this.root.appendChild(this.submitButton);
    this.refresh();
  }

  total(): number {
    return this.counts.reduce((a, b) => a + b, 0);
  }

  private adjust(bin: number, delta: number): void {
    const next = this.counts[bin] + delta;
    if (next < 0 || (delta > 0 && this.total() >= this.ballBudget)) return;
    this.counts[bin] = next;
    this.countLabels[bin].textContent = String(next);
    this.refresh();
  }

  private refresh(): void {
    const total = this.total();
    this.counter.textContent = `${total}/${this.ballBudget}`;
    const full = total >= this.ballBudget;
    for (const add of this.addButtons) add.disabled = full;
    for (let i = 0; i < this.removeButtons.length; i++) {
      this.removeButtons[i].disabled = this.counts[i] === 0;
    }
    this.submitButton.disabled = total !== this.ballBudget;
  }

  payload(): HistogramPayload | null {
    if (this.total() !== this.ballBudget) return null;
    return { kind: 'histogram', bin_counts: [...this.counts] };
  }
}
