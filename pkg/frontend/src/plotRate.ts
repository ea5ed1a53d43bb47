import { existsSync, writeFileSync } from "node:fs";
import { lnLogFit } from "./fit.js";
import {
  extractSeries,
  loadReport,
  loadTrialRows,
  Report,
  ReportError,
  TrialRow,
} from "./report.js";
import { Point, renderFigure } from "./svg.js";

/** A stored fit may differ from a refit of its own data by at most this. */
export const FIT_AGREEMENT = 1e-9;

export interface PlotOptions {
  /** reference slope; defaults to the summary's theoretical slope */
  exponent?: number;
  /** per-trial rows drawn as a light scatter behind the medians */
  trials?: TrialRow[];
}

/** Full-precision but trailing-zero-free, good to ~5e-12 on a round trip. */
function formatSlope(v: number): string {
  return Number(v.toPrecision(12)).toString();
}

export function buildFigure(report: Report, options: PlotOptions = {}): string {
  const series = extractSeries(report);

  // Annotations show the stored numbers, never locally recomputed ones.
  // The refit exists only to reject a report whose summary does not
  // describe its own data.
  const refit = lnLogFit(series.xs, series.ys);
  const slopeGap = Math.abs(refit.slope - series.fit.slope);
  const interceptGap = Math.abs(refit.intercept - series.fit.intercept);
  if (slopeGap > FIT_AGREEMENT || interceptGap > FIT_AGREEMENT) {
    throw new ReportError(
      `stored fit disagrees with its data: slope gap ${slopeGap.toExponential(2)}, ` +
        `intercept gap ${interceptGap.toExponential(2)}`,
    );
  }

  const exponent = options.exponent ?? series.theorySlope;
  if (!Number.isFinite(exponent)) {
    throw new ReportError("reference exponent must be finite");
  }

  const medians: Point[] = series.xs.map((x, i) => ({ x, y: series.ys[i] as number }));
  const trials: Point[] = (options.trials ?? []).map((r) => ({ x: r.x, y: r.error }));
  const anchor = medians[0] as Point;

  return renderFigure({
    title: `${series.kind} convergence (${report.kind} report)`,
    xLabel: series.xName,
    yLabel: report.summary.medians ? "median error" : "error",
    medians,
    trials: trials.length > 0 ? trials : undefined,
    fitLine: { slope: series.fit.slope, intercept: series.fit.intercept },
    referenceLine: { slope: exponent, anchor },
    annotations: [
      `fit slope ${formatSlope(series.fit.slope)} (R^2 ${series.fit.r_squared.toFixed(4)})`,
      `reference slope ${formatSlope(exponent)}`,
    ],
  });
}

export interface PlotSpec {
  reportPath: string;
  outPath: string;
  exponent?: number;
  /** trial csv; a sibling of the report with a .csv suffix is picked up when present */
  csvPath?: string;
}

export interface PlotResult {
  outPath: string;
  slope: number;
  exponent: number;
  points: number;
}

export function plotRate(spec: PlotSpec): PlotResult {
  const report = loadReport(spec.reportPath);
  let csvPath = spec.csvPath;
  if (csvPath === undefined) {
    const sibling = spec.reportPath.replace(/\.json$/, ".csv");
    if (sibling !== spec.reportPath && existsSync(sibling)) csvPath = sibling;
  }
  const trials = csvPath !== undefined ? loadTrialRows(csvPath) : [];
  const svg = buildFigure(report, { exponent: spec.exponent, trials });
  writeFileSync(spec.outPath, svg);
  const series = extractSeries(report);
  return {
    outPath: spec.outPath,
    slope: series.fit.slope,
    exponent: spec.exponent ?? series.theorySlope,
    points: series.xs.length,
  };
}
