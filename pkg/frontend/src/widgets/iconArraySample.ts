// Sample elicitation on a circle grid: clicking the k-th of N circles marks
// the sample k/N for the current round.

import { el } from '../controls.js';
import { circleIcon } from '../icons.js';
import type { SamplesPayload, WidgetSpec } from '../types.js';
import { RoundRecorder } from './rounds.js';

export class IconArraySampleWidget {
  readonly root: HTMLElement;
  readonly rounds: RoundRecorder;
  readonly cells: HTMLButtonElement[] = [];

  private selected: number | null = null;

  constructor(spec: WidgetSpec, onSubmit?: (payload: SamplesPayload) => void) {
    const rows = spec.grid_rows ?? 10;
    const cols = spec.grid_cols ?? 10;
    const total = rows * cols;
    this.root = el('div', 'icon-array-sample');
    if (spec.copy) this.root.appendChild(el('p', 'widget-copy', spec.copy));

    const grid = el('div', 'icon-grid');
    grid.style.display = 'grid';
    grid.style.gridTemplateColumns = `repeat(${cols}, min-content)`;
    for (let k = 1; k <= total; k++) {
      const cell = document.createElement('button');
      cell.type = 'button';
      cell.className = 'icon-cell';
      cell.dataset.value = String(k);
      cell.setAttribute('aria-label', `${k} of ${total}`);
      cell.appendChild(circleIcon());
      cell.addEventListener('click', () => this.select(k));
      this.cells.push(cell);
      grid.appendChild(cell);
    }
    this.root.appendChild(grid);

    this.rounds = new RoundRecorder(
      spec.rounds ?? 5,
      {
        currentSample: () => (this.selected === null ? null : this.selected / total),
        resetPicker: () => this.clearSelection(),
      },
      onSubmit,
    );
    this.root.appendChild(this.rounds.root);
  }

  private select(k: number): void {
    this.selected = k;
    for (const cell of this.cells) {
      cell.classList.toggle('selected', Number(cell.dataset.value) <= k);
    }
    this.rounds.refresh();
  }

  private clearSelection(): void {
    this.selected = null;
    for (const cell of this.cells) cell.classList.remove('selected');
  }

  payload(): SamplesPayload | null {
    return this.rounds.payload();
  }
}
