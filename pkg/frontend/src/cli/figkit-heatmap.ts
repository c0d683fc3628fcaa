#!/usr/bin/env node
/** figkit-heatmap <sweep.csv> <out.svg> [--linear] [--title TEXT] */

import { readFileSync, writeFileSync } from "fs";
import { CsvError, parseCsv } from "../csv.js";
import { renderHeatmap } from "../heatmap.js";

function main(argv: string[]): number {
  const positional: string[] = [];
  let scale: "log" | "linear" = "log";
  let title: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--linear") scale = "linear";
    else if (arg === "--log") scale = "log";
    else if (arg === "--title") title = argv[++i];
    else if (arg.startsWith("--")) {
      process.stderr.write(`unknown option ${arg}\n`);
      return 2;
    } else positional.push(arg);
  }
  if (positional.length !== 2) {
    process.stderr.write("usage: figkit-heatmap <sweep.csv> <out.svg> [--linear] [--title TEXT]\n");
    return 2;
  }
  const [input, output] = positional;
  try {
    const table = parseCsv(readFileSync(input, "utf-8"), input);
    writeFileSync(output, renderHeatmap(table, { scale, title }));
  } catch (err) {
    if (err instanceof CsvError || (err as NodeJS.ErrnoException).code !== undefined) {
      process.stderr.write(`figkit-heatmap: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
