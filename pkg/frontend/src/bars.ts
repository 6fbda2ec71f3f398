// Frequency-bar figure: one bar per epsilon group at a single snapshot
// episode, bar height = fraction of seeds that reached the optimal
// policy there. The whisker shows the 95% interval of the group's mean
// return at the same snapshot (the only interval the summary carries);
// both quantities live on the same [0, 1] axis.

import { SvgDoc, PALETTE, clamp, drawFrame } from "./svg.js";
import {
  SummaryRow,
  episodesOf,
  groupByEpsilon,
  groupLabel,
  nearestEpisode,
} from "./summary.js";

export class SnapshotError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SnapshotError";
  }
}

export function renderBars(rows: SummaryRow[], episode: number): string {
  if (!episodesOf(rows).includes(episode)) {
    throw new SnapshotError(
      `episode ${episode} not in summary; nearest is ${nearestEpisode(rows, episode)}`
    );
  }
  const at = rows.filter((r) => r.episode === episode);
  const groups = groupByEpsilon(at);

  const doc = new SvgDoc();
  const { x0, x1, y0, yScale } = drawFrame(doc, "optimal policy frequency");
  const slot = (x1 - x0) / groups.size;
  const barWidth = slot * 0.6;

  let rank = 0;
  for (const [eps, g] of groups) {
    const r = g[0];
    const color = PALETTE[rank % PALETTE.length];
    const cx = x0 + slot * (rank + 0.5);
    const top = yScale(r.optimalFrequency);
    doc.rect(cx - barWidth / 2, top, barWidth, y0 - top, color, "freq-bar");
    const lo = yScale(clamp(r.ci95Low, 0, 1));
    const hi = yScale(clamp(r.ci95High, 0, 1));
    doc.line(cx, lo, cx, hi, "#222222", 1.5);
    doc.line(cx - 6, hi, cx + 6, hi, "#222222", 1.5);
    doc.line(cx - 6, lo, cx + 6, lo, "#222222", 1.5);
    doc.text(cx, y0 + 20, groupLabel(eps), "middle", 11);
    rank++;
  }
  doc.text((x0 + x1) / 2, y0 + 40, `episode ${episode}`, "middle");

  return doc.render();
}
