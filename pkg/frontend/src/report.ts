import { readFileSync } from "node:fs";
import Papa from "papaparse";
import { z } from "zod";

export const SCHEMA_VERSION = 1;

const fitSchema = z.object({
  slope: z.number(),
  intercept: z.number(),
  r_squared: z.number(),
});

// Summaries carry more fields than the figure needs (config echo, seeds,
// wall clock); passthrough keeps them available without pinning the shape.
const summarySchema = z
  .object({
    fit: fitSchema,
    theory_slope: z.number(),
    n_values: z.array(z.number()).optional(),
    tau_values: z.array(z.number()).optional(),
    medians: z.array(z.number()).optional(),
    errors: z.array(z.number()).optional(),
  })
  .passthrough();

const reportSchema = z.object({
  kind: z.string(),
  schema_version: z.number(),
  x_name: z.string(),
  summary: summarySchema,
});

export type Fit = z.infer<typeof fitSchema>;
export type Report = z.infer<typeof reportSchema>;

/** One plottable series pulled out of a report summary. */
export interface Series {
  kind: string;
  xName: string;
  xs: number[];
  ys: number[];
  fit: Fit;
  theorySlope: number;
}

export class ReportError extends Error {}

export function parseReport(text: string): Report {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    throw new ReportError(`report is not valid JSON: ${(e as Error).message}`);
  }
  const parsed = reportSchema.safeParse(raw);
  if (!parsed.success) {
    throw new ReportError(`malformed report: ${parsed.error.issues[0]?.message}`);
  }
  const report = parsed.data;
  if (report.schema_version !== SCHEMA_VERSION) {
    throw new ReportError(
      `unsupported schema_version ${report.schema_version}, expected ${SCHEMA_VERSION}`,
    );
  }
  return report;
}

export function loadReport(path: string): Report {
  return parseReport(readFileSync(path, "utf8"));
}

/**
 * Normalizes the two summary layouts: rate and concentration reports list
 * n_values with per-n medians, approximation reports list tau_values with
 * one error per tau. x_name says which one applies.
 */
export function extractSeries(report: Report): Series {
  const s = report.summary;
  const xs = report.x_name === "tau" ? s.tau_values : s.n_values;
  const ys = s.medians ?? s.errors;
  if (!xs || !ys) {
    throw new ReportError(`summary lacks ${report.x_name} values or errors`);
  }
  if (xs.length !== ys.length) {
    throw new ReportError(`summary has ${xs.length} x values but ${ys.length} errors`);
  }
  if (new Set(xs).size < 2) {
    throw new ReportError("need at least two distinct x values to draw a rate figure");
  }
  for (const v of [...xs, ...ys]) {
    if (!Number.isFinite(v) || v <= 0) {
      throw new ReportError("x values and errors must be positive and finite for log axes");
    }
  }
  return {
    kind: report.kind,
    xName: report.x_name,
    xs,
    ys,
    fit: s.fit,
    theorySlope: s.theory_slope,
  };
}

/** One benchmark trial; x is whatever the report's x_name says it is. */
export interface TrialRow {
  x: number;
  trial: number;
  seed: string;
  error: number;
}

const TRIAL_COLUMNS = ["n", "trial", "seed", "error"];

export function parseTrialRows(text: string): TrialRow[] {
  const parsed = Papa.parse<Record<string, unknown>>(text, {
    header: true,
    comments: "#",
    skipEmptyLines: true,
    // seeds are 64-bit and would lose digits as doubles
    dynamicTyping: (field) => field !== "seed",
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new ReportError(`csv parse error: ${first?.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  if (fields.join(",") !== TRIAL_COLUMNS.join(",")) {
    throw new ReportError(
      `expected csv columns ${TRIAL_COLUMNS.join(",")}, got ${fields.join(",")}`,
    );
  }
  return parsed.data.map((row, i) => {
    const x = row.n;
    const trial = row.trial;
    const error = row.error;
    if (typeof x !== "number" || typeof trial !== "number" || typeof error !== "number") {
      throw new ReportError(`csv row ${i + 1} has non-numeric fields`);
    }
    return { x, trial, seed: String(row.seed), error };
  });
}

export function loadTrialRows(path: string): TrialRow[] {
  return parseTrialRows(readFileSync(path, "utf8"));
}
