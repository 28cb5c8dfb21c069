/**
 * Standalone chart command.
 *
 * Usage: node dist/cli.js --csv sweep.csv --x {k|l} --out-dir charts/
 * Exit codes: 0 ok, 2 CSV contract violation, 4 I/O error.
 */

import { CsvParseError, EmptyInput, HeaderMismatch } from "./csv.js";
import { ChartSpec, render, XAxisKey } from "./render.js";

function usage(): string {
  return "usage: cli --csv PATH --x {k|l} --out-dir DIR [--metrics peb_m,reb_rad]";
}

export function parseArgs(argv: string[]): ChartSpec {
  let csv: string | undefined;
  let x: string | undefined;
  let outDir: string | undefined;
  let metrics: string | undefined;
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${key}\n${usage()}`);
    switch (key) {
      case "--csv": csv = value; break;
      case "--x": x = value; break;
      case "--out-dir": outDir = value; break;
      case "--metrics": metrics = value; break;
      default: throw new Error(`unknown flag ${key}\n${usage()}`);
    }
  }
  if (!csv || !outDir || (x !== "k" && x !== "l")) {
    throw new Error(usage());
  }
  const spec: ChartSpec = { inputCsv: csv, xAxis: x as XAxisKey, outDir };
  if (metrics) {
    const parsed = metrics.split(",").filter(Boolean);
    for (const m of parsed) {
      if (m !== "peb_m" && m !== "reb_rad") {
        throw new Error(`unknown metric ${m}\n${usage()}`);
      }
    }
    spec.metrics = parsed as ChartSpec["metrics"];
  }
  return spec;
}

export function main(argv: string[]): number {
  try {
    const files = render(parseArgs(argv));
    for (const f of files) console.log(f);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    if (err instanceof HeaderMismatch || err instanceof EmptyInput
        || err instanceof CsvParseError) {
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code !== undefined) {
      return 4;
    }
    return 2;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
