import { existsSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, describe, expect, it } from "vitest";
import { main } from "../src/cli.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const scratch = mkdtempSync(join(tmpdir(), "plot-rate-cli-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

function run(argv: string[]): { code: number; out: string[]; err: string[] } {
  const out: string[] = [];
  const err: string[] = [];
  const code = main(argv, (l) => out.push(l), (l) => err.push(l));
  return { code, out, err };
}

describe("plot-rate cli", () => {
  it("renders a figure from a report", () => {
    const outPath = join(scratch, "rate.svg");
    const res = run(["--report", join(FIXTURES, "rate.json"), "--out", outPath]);
    expect(res.code).toBe(0);
    expect(res.out.join("\n")).toContain(`wrote ${outPath}`);
    expect(existsSync(outPath)).toBe(true);
    expect(readFileSync(outPath, "utf8")).toContain("</svg>");
  });

  it("accepts an explicit exponent and csv", () => {
    const outPath = join(scratch, "explicit.svg");
    const res = run([
      "--report", join(FIXTURES, "approximation.json"),
      "--csv", join(FIXTURES, "approximation.csv"),
      "--exponent", "-1.0",
      "--out", outPath,
    ]);
    expect(res.code).toBe(0);
    expect(readFileSync(outPath, "utf8")).toContain("reference slope -1");
  });

  it("accepts the equals spelling for negative exponents", () => {
    const outPath = join(scratch, "eq.svg");
    const res = run(["--report", join(FIXTURES, "rate.json"), "--out", outPath, "--exponent=-0.5"]);
    expect(res.code).toBe(0);
    expect(readFileSync(outPath, "utf8")).toContain("reference slope -0.5");
  });

  it("prints usage on missing or unknown flags", () => {
    expect(run([]).code).toBe(2);
    expect(run([]).err.join("\n")).toContain("usage:");
    expect(run(["--report", "x.json"]).code).toBe(2);
    expect(run(["--frobnicate"]).code).toBe(2);
    expect(run(["--report", "x.json", "--out", "y.svg", "--exponent", "abc"]).code).toBe(2);
  });

  it("shows help and exits cleanly", () => {
    const res = run(["--help"]);
    expect(res.code).toBe(0);
    expect(res.out.join("\n")).toContain("usage:");
  });

  it("maps unreadable input to exit 1", () => {
    const res = run(["--report", join(scratch, "absent.json"), "--out", join(scratch, "a.svg")]);
    expect(res.code).toBe(1);
    expect(res.err.join("\n")).toContain("error:");
  });

  it("refuses a schema version it does not understand", () => {
    const doc = JSON.parse(readFileSync(join(FIXTURES, "rate.json"), "utf8"));
    doc.schema_version = 99;
    const tampered = join(scratch, "tampered.json");
    writeFileSync(tampered, JSON.stringify(doc));
    const res = run(["--report", tampered, "--out", join(scratch, "t.svg")]);
    expect(res.code).toBe(1);
    expect(res.err.join("\n")).toContain("schema_version 99");
    expect(existsSync(join(scratch, "t.svg"))).toBe(false);
  });

  it("refuses a report with a single sample count", () => {
    const doc = JSON.parse(readFileSync(join(FIXTURES, "rate.json"), "utf8"));
    doc.summary.n_values = [64];
    doc.summary.medians = doc.summary.medians.slice(0, 1);
    const single = join(scratch, "single.json");
    writeFileSync(single, JSON.stringify(doc));
    const res = run(["--report", single, "--out", join(scratch, "s.svg")]);
    expect(res.code).toBe(1);
    expect(res.err.join("\n")).toContain("two distinct");
  });
});
