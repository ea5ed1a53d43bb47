import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import {
  extractSeries,
  parseReport,
  parseTrialRows,
  ReportError,
  type Report,
} from "../src/report.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

describe("parseReport", () => {
  it("accepts a benchmark rate report", () => {
    const report = parseReport(fixture("rate.json"));
    expect(report.kind).toBe("rate");
    expect(report.x_name).toBe("n");
    expect(report.schema_version).toBe(1);
    expect(report.summary.fit.r_squared).toBeGreaterThan(0);
  });

  it("refuses a schema_version from the future", () => {
    const doc = JSON.parse(fixture("rate.json"));
    doc.schema_version = 2;
    expect(() => parseReport(JSON.stringify(doc))).toThrow(/schema_version/);
  });

  it("refuses non-JSON and structurally wrong documents", () => {
    expect(() => parseReport("{nope")).toThrow(/not valid JSON/);
    expect(() => parseReport('{"kind": "rate"}')).toThrow(ReportError);
    expect(() => parseReport('[1, 2]')).toThrow(/malformed/);
  });
});

describe("extractSeries", () => {
  it("reads n_values and medians from a rate report", () => {
    const series = extractSeries(parseReport(fixture("rate.json")));
    expect(series.xName).toBe("n");
    expect(series.xs).toEqual([64, 128, 256, 512]);
    expect(series.ys).toHaveLength(4);
    expect(series.ys.every((y) => y > 0)).toBe(true);
  });

  it("reads tau_values and errors when x_name is tau", () => {
    const series = extractSeries(parseReport(fixture("approximation.json")));
    expect(series.xName).toBe("tau");
    expect(series.xs).toEqual([4, 8, 16, 32]);
    // approximation summaries store one error per tau, no medians
    expect(series.ys).toHaveLength(4);
    expect(series.fit.slope).toBeLessThan(0);
  });

  it("refuses a report with fewer than two distinct x values", () => {
    const doc = JSON.parse(fixture("rate.json")) as Report;
    doc.summary.n_values = [64];
    doc.summary.medians = doc.summary.medians?.slice(0, 1);
    expect(() => extractSeries(doc)).toThrow(/two distinct/);
  });

  it("refuses mismatched or unusable values", () => {
    const base = JSON.parse(fixture("rate.json")) as Report;
    const short = structuredClone(base);
    short.summary.medians = short.summary.medians?.slice(0, 2);
    expect(() => extractSeries(short)).toThrow(/4 x values but 2/);

    const negative = structuredClone(base);
    negative.summary.medians = negative.summary.medians?.map((m, i) => (i === 1 ? -m : m));
    expect(() => extractSeries(negative)).toThrow(/positive/);

    const missing = structuredClone(base);
    delete missing.summary.n_values;
    expect(() => extractSeries(missing)).toThrow(/lacks/);
  });
});

describe("parseTrialRows", () => {
  it("reads the trial table next to a rate report", () => {
    const rows = parseTrialRows(fixture("rate.csv"));
    expect(rows).toHaveLength(12);
    expect(rows[0]?.x).toBe(64);
    expect(rows[0]?.trial).toBe(0);
    expect(rows.every((r) => r.error > 0)).toBe(true);
    const xs = new Set(rows.map((r) => r.x));
    expect([...xs].sort((a, b) => a - b)).toEqual([64, 128, 256, 512]);
  });

  it("keeps 64-bit seeds intact as strings", () => {
    const rows = parseTrialRows(fixture("rate.csv"));
    const seed = rows[0]?.seed;
    expect(seed).toMatch(/^\d+$/);
    // doubles would round this far above Number.MAX_SAFE_INTEGER
    expect(seed).toBe(fixture("rate.csv").split("\n")[1]?.split(",")[2]);
  });

  it("carries tau in the leading column of approximation tables", () => {
    const rows = parseTrialRows(fixture("approximation.csv"));
    expect(rows.map((r) => r.x)).toEqual([4, 8, 16, 32]);
    expect(rows.every((r) => r.trial === 0)).toBe(true);
  });

  it("skips comment headers", () => {
    const text = '# config={"seed": 1}\n# seed=1 rng=philox schema_version=1\nn,trial,seed,error\n8,0,123,0.5\n';
    const rows = parseTrialRows(text);
    expect(rows).toEqual([{ x: 8, trial: 0, seed: "123", error: 0.5 }]);
  });

  it("refuses unfamiliar column layouts", () => {
    expect(() => parseTrialRows("a,b\n1,2\n")).toThrow(/expected csv columns/);
    expect(() => parseTrialRows("n,trial,seed,error\n1,0,9,oops\n")).toThrow(/non-numeric/);
  });
});
