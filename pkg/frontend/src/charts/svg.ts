// Dependency-free SVG line charts (log or linear x) rendered to strings.
// Values are plotted exactly as given; no smoothing, no resampling.

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  xLog?: boolean;
  xLabel?: string;
  yLabel?: string;
  shadeX?: [number, number];
  title?: string;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { left: 58, right: 14, top: 26, bottom: 40 };

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= n) ?? candidates[3]!;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(v);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length ? ticks : [lo, hi];
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function lineChart(series: Series[], opts: ChartOptions = {}): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 280;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.x).filter((v) => Number.isFinite(v) && (!opts.xLog || v > 0));
  const ys = series.flatMap((s) => s.y).filter((v) => Number.isFinite(v));
  if (!xs.length || !ys.length) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="12" y="24">no data</text></svg>`;
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (yHi === yLo) {
    yHi += 1;
    yLo -= 1;
  }
  const yPad = 0.05 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;

  const tx = (v: number) =>
    MARGIN.left + (opts.xLog
      ? ((Math.log10(v) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo))) * innerW
      : ((v - xLo) / (xHi - xLo)) * innerW);
  const ty = (v: number) => MARGIN.top + (1 - (v - yLo) / (yHi - yLo)) * innerH;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" class="chart">`);
  if (opts.title) {
    parts.push(`<text x="${MARGIN.left}" y="16" class="chart-title">${esc(opts.title)}</text>`);
  }
  if (opts.shadeX) {
    const [s0, s1] = opts.shadeX;
    const a = Math.max(Math.min(s0, s1), xLo);
    const b = Math.min(Math.max(s0, s1), xHi);
    if (b > a) {
      parts.push(`<rect x="${tx(a).toFixed(1)}" y="${MARGIN.top}" width="${(tx(b) - tx(a)).toFixed(1)}" height="${innerH}" fill="#f0e6c8" opacity="0.6"/>`);
    }
  }
  const xticks = opts.xLog ? decadeTicks(xLo, xHi) : niceTicks(xLo, xHi, 6);
  for (const v of xticks) {
    const x = tx(v).toFixed(1);
    parts.push(`<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + innerH}" stroke="#ddd"/>`);
    parts.push(`<text x="${x}" y="${MARGIN.top + innerH + 16}" text-anchor="middle" class="tick">${esc(formatTick(v))}</text>`);
  }
  for (const v of niceTicks(yLo, yHi, 5)) {
    const y = ty(v).toFixed(1);
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + innerW}" y2="${y}" stroke="#ddd"/>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${y}" text-anchor="end" dominant-baseline="middle" class="tick">${esc(formatTick(v))}</text>`);
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.x
      .map((xv, k) => [xv, s.y[k]] as const)
      .filter(([xv, yv]) => Number.isFinite(xv) && Number.isFinite(yv) && (!opts.xLog || xv > 0))
      .map(([xv, yv]) => `${tx(xv).toFixed(1)},${ty(yv as number).toFixed(1)}`)
      .join(" ");
    parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
    parts.push(`<g class="legend"><rect x="${MARGIN.left + 8 + i * 150}" y="${height - 14}" width="10" height="10" fill="${color}"/>` +
      `<text x="${MARGIN.left + 22 + i * 150}" y="${height - 5}" class="tick">${esc(s.label)}</text></g>`);
  });
  if (opts.xLabel) {
    parts.push(`<text x="${MARGIN.left + innerW / 2}" y="${height - 24}" text-anchor="middle" class="axis-label">${esc(opts.xLabel)}</text>`);
  }
  if (opts.yLabel) {
    parts.push(`<text x="14" y="${MARGIN.top + innerH / 2}" transform="rotate(-90 14 ${MARGIN.top + innerH / 2})" text-anchor="middle" class="axis-label">${esc(opts.yLabel)}</text>`);
  }
  parts.push("</svg>");
  return parts.join("");
}

function formatTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(0);
  }
  return String(Number(v.toPrecision(4)));
}
