import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, describe, expect, it } from "vitest";
import { lnLogFit } from "../src/fit.js";
import { buildFigure, plotRate } from "../src/plotRate.js";
import { parseReport, type Report } from "../src/report.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const scratch = mkdtempSync(join(tmpdir(), "plot-rate-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

function rateReport(): Report {
  return parseReport(readFileSync(join(FIXTURES, "rate.json"), "utf8"));
}

function annotatedSlope(svg: string, label: string): number {
  const m = svg.match(new RegExp(`${label} slope (-?[0-9.eE+-]+)`));
  expect(m, `figure lacks a '${label} slope' annotation`).not.toBeNull();
  return Number(m?.[1]);
}

/** A summary whose fit the package itself computed from an exact power law. */
function syntheticReport(slope: number, scale: number): Report {
  const xs = [16, 32, 64, 128, 256];
  const ys = xs.map((x) => scale * x ** slope);
  const fit = lnLogFit(xs, ys);
  return {
    kind: "rate",
    schema_version: 1,
    x_name: "n",
    summary: {
      n_values: xs,
      medians: ys,
      fit: { slope: fit.slope, intercept: fit.intercept, r_squared: fit.rSquared },
      theory_slope: slope,
    },
  };
}

describe("buildFigure", () => {
  it("annotates the slopes stored in the summary to 1e-9", () => {
    const report = rateReport();
    const svg = buildFigure(report);
    expect(Math.abs(annotatedSlope(svg, "fit") - report.summary.fit.slope)).toBeLessThan(1e-9);
    expect(Math.abs(annotatedSlope(svg, "reference") - report.summary.theory_slope)).toBeLessThan(
      1e-9,
    );
  });

  it("draws fit, reference, and median markers", () => {
    const svg = buildFigure(rateReport());
    expect(svg).toContain('class="fit-line"');
    expect(svg).toContain('stroke-dasharray');
    expect(svg.match(/class="median-point"/g)).toHaveLength(4);
    expect(svg).not.toContain('class="trial-point"');
  });

  it("recovers the truth on an exact power law within 0.01", () => {
    const truth = -0.5;
    const report = syntheticReport(truth, 2.0);
    const svg = buildFigure(report);
    expect(Math.abs(annotatedSlope(svg, "fit") - truth)).toBeLessThan(0.01);
    expect(Math.abs(annotatedSlope(svg, "fit") - report.summary.fit.slope)).toBeLessThan(1e-9);
  });

  it("aborts when the stored fit disagrees with its data", () => {
    const report = rateReport();
    report.summary.fit.slope += 1e-6;
    expect(() => buildFigure(report)).toThrow(/disagrees/);
  });

  it("honors an explicit reference exponent", () => {
    const svg = buildFigure(rateReport(), { exponent: -0.5 });
    expect(annotatedSlope(svg, "reference")).toBe(-0.5);
  });

  it("accepts tau-indexed reports", () => {
    const report = parseReport(readFileSync(join(FIXTURES, "approximation.json"), "utf8"));
    const svg = buildFigure(report);
    expect(Math.abs(annotatedSlope(svg, "fit") - report.summary.fit.slope)).toBeLessThan(1e-9);
    expect(svg).toContain(">tau</text>");
  });
});

describe("plotRate", () => {
  it("writes a figure and scatters the sibling trial table", () => {
    const outPath = join(scratch, "rate.svg");
    const result = plotRate({ reportPath: join(FIXTURES, "rate.json"), outPath });
    const svg = readFileSync(outPath, "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.match(/class="trial-point"/g)).toHaveLength(12);
    expect(result.points).toBe(4);
    expect(Math.abs(annotatedSlope(svg, "fit") - result.slope)).toBeLessThan(1e-9);
  });

  it("skips the scatter when asked for a bare figure", () => {
    const report = JSON.parse(readFileSync(join(FIXTURES, "rate.json"), "utf8"));
    const lonely = join(scratch, "lonely.json");
    writeFileSync(lonely, JSON.stringify(report));
    const outPath = join(scratch, "lonely.svg");
    plotRate({ reportPath: lonely, outPath });
    expect(readFileSync(outPath, "utf8")).not.toContain('class="trial-point"');
  });

  it("propagates missing files as errors", () => {
    expect(() =>
      plotRate({ reportPath: join(scratch, "absent.json"), outPath: join(scratch, "x.svg") }),
    ).toThrow(/ENOENT/);
  });
});
