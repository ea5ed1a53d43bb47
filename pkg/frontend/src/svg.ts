import { powerLaw } from "./fit.js";

export interface Point {
  x: number;
  y: number;
}

export interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  /** one point per x value, drawn prominently */
  medians: Point[];
  /** optional per-trial scatter drawn behind the medians */
  trials?: Point[];
  /** solid line, straight in log-log: y = exp(intercept) * x^slope */
  fitLine: { slope: number; intercept: number };
  /** dashed line with the given slope through the anchor point */
  referenceLine: { slope: number; anchor: Point };
  /** text lines drawn in the top-right corner of the plot area */
  annotations: string[];
  width?: number;
  height?: number;
}

const MARGIN = { left: 72, right: 24, top: 44, bottom: 56 };

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function px(v: number): string {
  return v.toFixed(2);
}

function formatTick(v: number): string {
  if (v >= 1 && v < 1e6 && Number.isInteger(v)) return String(v);
  const exp = Math.log10(v);
  if (Number.isInteger(exp)) return `1e${exp}`;
  return v.toPrecision(2);
}

/** Decade ticks where the span allows, a short geometric grid otherwise. */
function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(Math.log10(lo)); k <= Math.floor(Math.log10(hi)); k++) {
    ticks.push(10 ** k);
  }
  if (ticks.length >= 2) return ticks;
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  return [0, 1, 2, 3].map((i) => 10 ** (la + ((lb - la) * i) / 3));
}

function referenceValue(line: { slope: number; anchor: Point }, x: number): number {
  return line.anchor.y * (x / line.anchor.x) ** line.slope;
}

export function renderFigure(spec: FigureSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const points = [...spec.medians, ...(spec.trials ?? [])];
  if (points.length === 0) throw new Error("nothing to draw");
  const xsAll = points.map((p) => p.x);
  const xMin = Math.min(...xsAll);
  const xMax = Math.max(...xsAll);
  const ysAll = points
    .map((p) => p.y)
    .concat(
      [xMin, xMax].map((x) => powerLaw(spec.fitLine, x)),
      [xMin, xMax].map((x) => referenceValue(spec.referenceLine, x)),
    );
  const yMin = Math.min(...ysAll);
  const yMax = Math.max(...ysAll);

  // pad both axes by 5% of the log span so markers stay off the frame
  const pad = (lo: number, hi: number): [number, number] => {
    const la = Math.log10(lo);
    const lb = Math.log10(hi);
    const margin = Math.max((lb - la) * 0.05, 0.02);
    return [10 ** (la - margin), 10 ** (lb + margin)];
  };
  const [x0, x1] = pad(xMin, xMax);
  const [y0, y1] = pad(yMin, yMax);

  const sx = (x: number) =>
    MARGIN.left + ((Math.log10(x) - Math.log10(x0)) / (Math.log10(x1) - Math.log10(x0))) * innerW;
  const sy = (y: number) =>
    MARGIN.top + innerH - ((Math.log10(y) - Math.log10(y0)) / (Math.log10(y1) - Math.log10(y0))) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  for (const t of logTicks(x0, x1)) {
    const gx = px(sx(t));
    parts.push(`<line x1="${gx}" y1="${MARGIN.top}" x2="${gx}" y2="${MARGIN.top + innerH}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${gx}" y="${MARGIN.top + innerH + 18}" text-anchor="middle" font-size="12">${escapeText(formatTick(t))}</text>`,
    );
  }
  for (const t of logTicks(y0, y1)) {
    const gy = px(sy(t));
    parts.push(`<line x1="${MARGIN.left}" y1="${gy}" x2="${MARGIN.left + innerW}" y2="${gy}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${gy}" text-anchor="end" dominant-baseline="middle" font-size="12">${escapeText(formatTick(t))}</text>`,
    );
  }

  const frame = `M ${MARGIN.left} ${MARGIN.top} h ${innerW} v ${innerH} h ${-innerW} Z`;
  parts.push(`<path d="${frame}" fill="none" stroke="#444"/>`);

  const refA = { x: x0, y: referenceValue(spec.referenceLine, x0) };
  const refB = { x: x1, y: referenceValue(spec.referenceLine, x1) };
  parts.push(
    `<line class="reference-line" x1="${px(sx(refA.x))}" y1="${px(sy(refA.y))}" x2="${px(sx(refB.x))}" y2="${px(sy(refB.y))}" stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 4"/>`,
  );
  parts.push(
    `<line class="fit-line" x1="${px(sx(x0))}" y1="${px(sy(powerLaw(spec.fitLine, x0)))}" x2="${px(sx(x1))}" y2="${px(sy(powerLaw(spec.fitLine, x1)))}" stroke="#1f5fa8" stroke-width="1.5"/>`,
  );

  for (const p of spec.trials ?? []) {
    parts.push(
      `<circle class="trial-point" cx="${px(sx(p.x))}" cy="${px(sy(p.y))}" r="2.5" fill="#9db9d6" fill-opacity="0.8"/>`,
    );
  }
  for (const p of spec.medians) {
    parts.push(
      `<circle class="median-point" cx="${px(sx(p.x))}" cy="${px(sy(p.y))}" r="4" fill="#1f5fa8"/>`,
    );
  }

  spec.annotations.forEach((line, i) => {
    parts.push(
      `<text class="annotation" x="${MARGIN.left + innerW - 10}" y="${MARGIN.top + 18 + i * 16}" text-anchor="end" font-size="12">${escapeText(line)}</text>`,
    );
  });

  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="15">${escapeText(spec.title)}</text>`,
  );
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 14}" text-anchor="middle" font-size="13">${escapeText(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + innerH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${MARGIN.top + innerH / 2})">${escapeText(spec.yLabel)}</text>`,
  );

  parts.push("</svg>");
  return parts.join("\n");
}
