#!/usr/bin/env node
// usage: plot <curves|bars> --summary <csv> --out <path> [--halfway N]

import { parseArgs } from "node:util";

import { plotBars, plotCurves } from "./plot.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        summary: { type: "string" },
        out: { type: "string" },
        halfway: { type: "string" },
      },
      allowPositionals: true,
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  const { values, positionals } = parsed;

  if (positionals.length !== 2 || positionals[0] !== "plot") {
    process.stderr.write(
      "usage: plot <curves|bars> --summary <csv> --out <path> [--halfway N]\n"
    );
    return 2;
  }
  const kind = positionals[1];
  if (kind !== "curves" && kind !== "bars") {
    process.stderr.write(`error: unknown figure kind ${kind}\n`);
    return 2;
  }
  if (!values.summary || !values.out) {
    process.stderr.write("error: --summary and --out are required\n");
    return 2;
  }

  let halfway: number | undefined;
  if (values.halfway !== undefined) {
    halfway = Number(values.halfway);
    if (!Number.isInteger(halfway)) {
      process.stderr.write(`error: --halfway must be an integer, got ${values.halfway}\n`);
      return 2;
    }
  }

  const job = {
    summaryPath: values.summary,
    outPath: values.out,
    halfwayEpisode: halfway,
  };
  try {
    if (kind === "curves") {
      plotCurves(job);
    } else {
      plotBars(job);
    }
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

// invoked as a script (not imported by tests)
if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
