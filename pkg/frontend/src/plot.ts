// File-level entry points: read a summary, render, write the image.
// All validation happens before the output path is touched, so a bad
// summary never leaves a partial file behind.

import { writeFileSync } from "node:fs";

import { renderBars } from "./bars.js";
import { renderCurves } from "./curves.js";
import { midpointEpisode, readSummary } from "./summary.js";

export interface PlotJob {
  summaryPath: string;
  outPath: string;
  halfwayEpisode?: number;
}

export function plotCurves(job: PlotJob): void {
  const rows = readSummary(job.summaryPath);
  writeFileSync(job.outPath, renderCurves(rows), "utf-8");
}

export function plotBars(job: PlotJob): void {
  const rows = readSummary(job.summaryPath);
  const episode = job.halfwayEpisode ?? midpointEpisode(rows);
  writeFileSync(job.outPath, renderBars(rows, episode), "utf-8");
}
