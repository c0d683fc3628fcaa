#!/usr/bin/env node
/** figkit-timeseries <trajectory.csv> <out.svg> [--couplings <couplings.csv>] */

import { readFileSync, writeFileSync } from "fs";
import { CsvError, parseCsv } from "../csv.js";
import { renderTimeseries } from "../timeseries.js";

function main(argv: string[]): number {
  const positional: string[] = [];
  let couplingsPath: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--couplings") couplingsPath = argv[++i];
    else if (arg.startsWith("--")) {
      process.stderr.write(`unknown option ${arg}\n`);
      return 2;
    } else positional.push(arg);
  }
  if (positional.length !== 2) {
    process.stderr.write(
      "usage: figkit-timeseries <trajectory.csv> <out.svg> [--couplings <couplings.csv>]\n",
    );
    return 2;
  }
  const [input, output] = positional;
  try {
    const trajectory = parseCsv(readFileSync(input, "utf-8"), input);
    const couplings =
      couplingsPath !== undefined
        ? parseCsv(readFileSync(couplingsPath, "utf-8"), couplingsPath)
        : undefined;
    writeFileSync(output, renderTimeseries(trajectory, couplings));
  } catch (err) {
    if (err instanceof CsvError || (err as NodeJS.ErrnoException).code !== undefined) {
      process.stderr.write(`figkit-timeseries: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
