// Closing attention check: one of three fixed ranges.

import { button, el } from './controls.js';
import type { AttentionAnswer, AttentionRange, AttentionSpec } from './types.js';

const RANGE_LABELS: Record<AttentionRange, string> = {
  R0_30: '0%-30%',
  R30_60: '30%-60%',
  R60_100: '60%-100%',
};

export class AttentionWidget {
  readonly root: HTMLElement;
  readonly submitButton: HTMLButtonElement;

  private picked: AttentionRange | null = null;

  constructor(spec: AttentionSpec, onSubmit?: (payload: AttentionAnswer) => void) {
    this.root = el('div', 'attention');
    this.root.appendChild(el('p', 'attention-question', spec.question));
    for (const range of spec.ranges) {
      const label = el('label', 'attention-option');
      const radio = document.createElement('input');
      radio.type = 'radio';
      radio.name = 'attention-range';
      radio.value = range;
      radio.addEventListener('click', () => {
        this.picked = range;
        this.submitButton.disabled = false;
      });
      label.append(radio, document.createTextNode(RANGE_LABELS[range]));
      this.root.appendChild(label);
    }
    this.submitButton = button('Submit', () => {
      if (this.picked && onSubmit) onSubmit({ answer: this.picked });
    });
    this.submitButton.disabled = true;
    this.root.appendChild(this.submitButton);
  }

  payload(): AttentionAnswer | null {
    return this.picked === null ? null : { answer: this.picked };
  }
}
