// Hand-rolled SVG charts: bars with optional highlighting, and a dot map.
// Every number rendered here arrives from the API; the only client-side
// computation is the highlight intersection.

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface Bar {
  label: string;
  value: number;
  highlighted?: boolean;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

export function barChart(bars: Bar[], opts: { width?: number; unit?: string } = {}): SVGSVGElement {
  const width = opts.width ?? 640;
  const rowH = 22;
  const labelW = 220;
  const maxValue = Math.max(1, ...bars.map((b) => b.value));
  const svg = svgEl('svg', {
    width,
    height: bars.length * rowH + 4,
    role: 'img',
    class: 'bar-chart',
  });
  bars.forEach((bar, i) => {
    const y = i * rowH;
    const barW = ((width - labelW - 60) * bar.value) / maxValue;
    const g = svgEl('g', { class: bar.highlighted ? 'bar highlighted' : 'bar' });
    g.setAttribute('data-label', bar.label);
    g.setAttribute('data-value', String(bar.value));
    if (bar.highlighted) g.setAttribute('data-highlighted', 'true');

    const label = svgEl('text', { x: labelW - 8, y: y + 15, 'text-anchor': 'end', class: 'bar-label' });
    label.textContent = bar.label;
    const rect = svgEl('rect', {
      x: labelW,
      y: y + 3,
      width: Math.max(1, barW),
      height: rowH - 7,
      fill: bar.highlighted ? '#e4572e' : '#4c7fb0',
    });
    const value = svgEl('text', { x: labelW + barW + 6, y: y + 15, class: 'bar-value' });
    value.textContent = `${bar.value}${opts.unit ?? ''}`;
    g.append(label, rect, value);
    svg.append(g);
  });
  return svg;
}

export interface MapDot {
  key: string;
  lat: number;
  lon: number;
  count: number;
}

export function dotMap(dots: MapDot[], opts: { width?: number } = {}): SVGSVGElement {
  const width = opts.width ?? 640;
  const height = width / 2;
  const svg = svgEl('svg', { width, height, class: 'dot-map', role: 'img' });
  svg.append(svgEl('rect', { x: 0, y: 0, width, height, fill: '#eef3f7' }));
  const maxCount = Math.max(1, ...dots.map((d) => d.count));
  for (const dot of dots) {
    const x = ((dot.lon + 180) / 360) * width;
    const y = ((90 - dot.lat) / 180) * height;
    const r = 3 + 9 * Math.sqrt(dot.count / maxCount);
    const circle = svgEl('circle', { cx: x, cy: y, r, fill: '#4c7fb0', 'fill-opacity': 0.65 });
    circle.setAttribute('data-key', dot.key);
    circle.setAttribute('data-count', String(dot.count));
    const title = svgEl('title', {});
    title.textContent = `${dot.key}: ${dot.count}`;
    circle.append(title);
    svg.append(circle);
  }
  return svg;
}
