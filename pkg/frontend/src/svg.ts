/**
 * Minimal deterministic SVG line plots. No timestamps, no randomness:
 * identical inputs produce byte-identical files.
 */

export type Scale = 'linear' | 'log';

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: Scale;
  yScale: Scale;
  series: Series[];
}

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };

function transform(value: number, scale: Scale): number {
  return scale === 'log' ? Math.log10(value) : value;
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function fmt(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function ticks(lo: number, hi: number, scale: Scale): number[] {
  if (scale === 'log') {
    const result: number[] = [];
    for (let p = Math.ceil(lo); p <= Math.floor(hi); p++) {
      result.push(p);
    }
    return result.length >= 2 ? result : [lo, hi];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const result: number[] = [];
  for (let t = Math.ceil(lo / (step * mult)) * step * mult; t <= hi + 1e-12 * span; t += step * mult) {
    result.push(t);
  }
  return result;
}

/** Render the plot spec to an SVG document string. */
export function renderSvg(spec: PlotSpec): string {
  const allX: number[] = [];
  const allY: number[] = [];
  for (const s of spec.series) {
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (spec.yScale === 'log' && !(y > 0)) continue;
      allX.push(transform(s.x[i], spec.xScale));
      allY.push(transform(y, spec.yScale));
    }
  }
  const [x0, x1] = extent(allX);
  const [y0, y1] = extent(allY);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((y - y0) / (y1 - y0)) * plotH;
  const coord = (v: number) => v.toFixed(2);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">${spec.title}</text>`,
  );

  for (const t of ticks(x0, x1, spec.xScale)) {
    const x = px(t);
    const label = spec.xScale === 'log' ? `1e${fmt(t)}` : fmt(t);
    parts.push(
      `<line x1="${coord(x)}" y1="${MARGIN.top}" x2="${coord(x)}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${coord(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${label}</text>`,
    );
  }
  for (const t of ticks(y0, y1, spec.yScale)) {
    const y = py(t);
    const label = spec.yScale === 'log' ? `1e${fmt(t)}` : fmt(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${coord(y)}" x2="${MARGIN.left + plotW}" y2="${coord(y)}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${coord(y + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${label}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-family="sans-serif" font-size="13">${spec.xLabel}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${spec.yLabel}</text>`,
  );

  spec.series.forEach((s, idx) => {
    const points: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (spec.yScale === 'log' && !(y > 0)) continue;
      points.push(
        `${coord(px(transform(s.x[i], spec.xScale)))},${coord(py(transform(y, spec.yScale)))}`,
      );
    }
    const dash = s.dashed ? ' stroke-dasharray="6,4"' : '';
    parts.push(
      `<polyline points="${points.join(' ')}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
    );
    const ly = MARGIN.top + 14 + idx * 16;
    parts.push(
      `<line x1="${MARGIN.left + plotW - 130}" y1="${ly - 4}" x2="${MARGIN.left + plotW - 110}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
    );
    parts.push(
      `<text x="${MARGIN.left + plotW - 105}" y="${ly}" font-family="sans-serif" font-size="11">${s.label}</text>`,
    );
  });

  parts.push('</svg>');
  return parts.join('\n') + '\n';
}
