export {
  REQUIRED_COLUMNS,
  SchemaError,
  episodesOf,
  groupByEpsilon,
  groupLabel,
  midpointEpisode,
  nearestEpisode,
  parseSummary,
  readSummary,
} from "./summary.js";
export type { SummaryRow } from "./summary.js";
export { renderCurves } from "./curves.js";
export { renderBars, SnapshotError } from "./bars.js";
export { plotBars, plotCurves } from "./plot.js";
export type { PlotJob } from "./plot.js";
