// Observed-data displays: a static icon array, or an animated sequence of
// hypothetical outcomes advancing one frame per fixed period. Frames come
// from the server; nothing is sampled in the browser.

import { el } from './controls.js';
import { personIcon } from './icons.js';
import type { StimulusSpec } from './types.js';

/** Icons to fill for a proportion: ceiling, except exact products stay put. */
export function filledIcons(proportion: number, cells: number): number {
  const raw = proportion * cells;
  const nearest = Math.round(raw);
  const filled = Math.abs(raw - nearest) < 1e-9 ? nearest : Math.ceil(raw);
  return Math.min(cells, Math.max(0, filled));
}

function personGrid(rows: number, cols: number): { grid: HTMLElement; icons: SVGSVGElement[] } {
  const grid = el('div', 'stimulus-grid');
  grid.style.display = 'grid';
  grid.style.gridTemplateColumns = `repeat(${cols}, min-content)`;
  const icons: SVGSVGElement[] = [];
  for (let i = 0; i < rows * cols; i++) {
    const icon = personIcon();
    icons.push(icon);
    grid.appendChild(icon);
  }
  return { grid, icons };
}

function fillGrid(icons: SVGSVGElement[], proportion: number): void {
  const filled = filledIcons(proportion, icons.length);
  icons.forEach((icon, i) => icon.classList.toggle('filled', i < filled));
}

export class StaticIconArray {
  readonly root: HTMLElement;
  readonly icons: SVGSVGElement[];

  constructor(spec: StimulusSpec) {
    const rows = spec.grid_rows ?? 10;
    const cols = spec.grid_cols ?? 10;
    this.root = el('div', 'static-stimulus');
    const { grid, icons } = personGrid(rows, cols);
    this.icons = icons;
    fillGrid(this.icons, spec.proportion ?? 0);
    this.root.appendChild(grid);
    const unit = spec.icon_unit ?? 1;
    this.root.appendChild(
      el('p', 'stimulus-caption', `Each icon represents ${unit} ${spec.label || 'people'}.`),
    );
  }
}

export type Scheduler = {
  now(): number;
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
};

const wallClock: Scheduler = {
  now: () => performance.now(),
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

export class HopsPlayer {
  readonly root: HTMLElement;
  readonly icons: SVGSVGElement[];
  /** Set when the server sent no frames and the display degraded to static. */
  readonly fallback: boolean;
  frameIndex = 0;

  private frames: number[];
  private duration: number;
  private scheduler: Scheduler;
  private onFrame?: (index: number, at: number) => void;
  private handle: unknown = null;
  private startAt = 0;
  private ticks = 0;
  private counter: HTMLElement;

  constructor(
    spec: StimulusSpec,
    opts: { scheduler?: Scheduler; onFrame?: (index: number, at: number) => void } = {},
  ) {
    this.frames = spec.frames ?? [];
    this.duration = spec.frame_duration_ms ?? 400;
    this.scheduler = opts.scheduler ?? wallClock;
    this.onFrame = opts.onFrame;
    this.fallback = this.frames.length === 0;

    const rows = spec.grid_rows ?? 10;
    const cols = spec.grid_cols ?? 10;
    this.root = el('div', 'hops-stimulus');
    const { grid, icons } = personGrid(rows, cols);
    this.icons = icons;
    this.root.appendChild(grid);
    this.counter = el('p', 'hops-counter');
    this.root.appendChild(this.counter);
    if (this.fallback) {
      this.root.dataset.telemetry = 'missing-frames';
      fillGrid(this.icons, spec.proportion ?? 0);
      this.counter.textContent = 'Animation unavailable; showing a single outcome.';
    }
  }

  start(): void {
    if (this.fallback || this.handle !== null) return;
    this.startAt = this.scheduler.now();
    this.ticks = 0;
    this.renderFrame(0, this.startAt);
    this.schedule();
  }

  stop(): void {
    if (this.handle !== null) {
      this.scheduler.clearTimeout(this.handle);
      this.handle = null;
    }
  }

  private schedule(): void {
    // Each tick aims at an absolute target so a late callback does not
    // push every later frame back with it.
    const target = this.startAt + (this.ticks + 1) * this.duration;
    const delay = Math.max(0, target - this.scheduler.now());
    this.handle = this.scheduler.setTimeout(() => {
      this.ticks += 1;
      this.renderFrame(this.ticks % this.frames.length, this.scheduler.now());
      this.schedule();
    }, delay);
  }

  private renderFrame(index: number, at: number): void {
    this.frameIndex = index;
    fillGrid(this.icons, this.frames[index] ?? 0);
    this.counter.textContent = `outcome ${index + 1} of ${this.frames.length}`;
    if (this.onFrame) this.onFrame(index, at);
  }
}
