// SVG icon builders. Elicitation grids use plain circles (participants mark
// positions in parameter space); stimulus arrays use person glyphs (each
// icon stands for a block of actual people).

const SVG_NS = 'http://www.w3.org/2000/svg';

export function circleIcon(size = 22): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', '0 0 20 20');
  svg.setAttribute('width', String(size));
  svg.setAttribute('height', String(size));
  const circle = document.createElementNS(SVG_NS, 'circle');
  circle.setAttribute('cx', '10');
  circle.setAttribute('cy', '10');
  circle.setAttribute('r', '8');
  circle.classList.add('icon-circle');
  svg.appendChild(circle);
  return svg;
}

// Head plus shoulders-and-body outline, the usual pictograph silhouette.
const PERSON_PATH =
  'M10 2 a3.2 3.2 0 1 1 0 6.4 a3.2 3.2 0 1 1 0 -6.4 Z ' +
  'M4.5 19 v-4.5 a4.5 4.5 0 0 1 4.5 -4.5 h2 a4.5 4.5 0 0 1 4.5 4.5 V19 Z';

export function personIcon(size = 22): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', '0 0 20 20');
  svg.setAttribute('width', String(size));
  svg.setAttribute('height', String(size));
  const path = document.createElementNS(SVG_NS, 'path');
  path.setAttribute('d', PERSON_PATH);
  path.classList.add('icon-person');
  svg.appendChild(path);
  return svg;
}
