// Small shared form controls.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/**
 * A 0-100 slider with a live numeric echo, used for confidences and for the
 * interval probability: the displayed number always matches the slider.
 */
export class PercentSlider {
  readonly root: HTMLElement;
  readonly input: HTMLInputElement;
  readonly echo: HTMLOutputElement;

  constructor(label: string, initial = 50) {
    this.root = el('div', 'percent-slider');
    const caption = el('label', 'percent-slider-label', label);
    this.input = document.createElement('input');
    this.input.type = 'range';
    this.input.min = '0';
    this.input.max = '100';
    this.input.step = '1';
    this.input.value = String(initial);
    this.echo = document.createElement('output');
    this.echo.className = 'percent-slider-echo';
    this.echo.textContent = String(initial);
    this.input.addEventListener('input', () => {
      this.echo.textContent = this.input.value;
    });
    caption.appendChild(this.input);
    this.root.appendChild(caption);
    this.root.appendChild(this.echo);
  }

  value(): number {
    return Number(this.input.value);
  }

  reset(value: number): void {
    this.input.value = String(value);
    this.echo.textContent = String(value);
  }
}

export function button(label: string, onClick: () => void): HTMLButtonElement {
  const node = el('button', undefined, label);
  node.type = 'button';
  node.addEventListener('click', onClick);
  return node;
}
