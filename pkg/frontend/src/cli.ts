#!/usr/bin/env node
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";
import { plotRate } from "./plotRate.js";
import { ReportError } from "./report.js";

const USAGE = `usage: plot-rate --report PATH.json --out PATH.svg [--exponent FLOAT] [--csv PATH]

Renders a log-log convergence figure from a benchmark report. The solid
line is the fit stored in the report summary, the dashed line is the
reference slope anchored at the first point. --exponent overrides the
reference slope (default: the summary's theoretical slope); --csv points
at a trial table to scatter behind the medians (default: the report's
.csv sibling when present).`;

type Logger = (line: string) => void;

/**
 * parseArgs treats a leading dash in the next token as an option, so the
 * usual spelling of a negative reference slope needs folding into the
 * --exponent=VALUE form first.
 */
function normalizeArgv(argv: string[]): string[] {
  const args: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i] as string;
    const next = argv[i + 1];
    if (a === "--exponent" && next !== undefined && /^-\d/.test(next)) {
      args.push(`--exponent=${next}`);
      i++;
    } else {
      args.push(a);
    }
  }
  return args;
}

export function main(
  argv: string[],
  out: Logger = console.log,
  err: Logger = console.error,
): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: normalizeArgv(argv),
      options: {
        report: { type: "string" },
        out: { type: "string" },
        exponent: { type: "string" },
        csv: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
      allowPositionals: false,
    }));
  } catch (e) {
    err(`error: ${(e as Error).message}`);
    err(USAGE);
    return 2;
  }
  if (values.help) {
    out(USAGE);
    return 0;
  }
  if (!values.report || !values.out) {
    err("error: --report and --out are required");
    err(USAGE);
    return 2;
  }
  let exponent: number | undefined;
  if (values.exponent !== undefined) {
    exponent = Number(values.exponent);
    if (!Number.isFinite(exponent)) {
      err(`error: --exponent must be a finite number, got '${values.exponent}'`);
      return 2;
    }
  }
  try {
    const result = plotRate({
      reportPath: values.report,
      outPath: values.out,
      exponent,
      csvPath: values.csv,
    });
    out(`wrote ${result.outPath} (fit slope ${result.slope.toFixed(4)}, reference ${result.exponent.toFixed(4)})`);
    return 0;
  } catch (e) {
    if (e instanceof ReportError || (e as NodeJS.ErrnoException).code !== undefined) {
      err(`error: ${(e as Error).message}`);
      return 1;
    }
    throw e;
  }
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(entry).href) {
  process.exit(main(process.argv.slice(2)));
}
