// Training-curve figure: one mean line per epsilon group with its
// shaded 95% band, legend ordered by epsilon ("Normal" first).

import { SvgDoc, MARGIN, PALETTE, clamp, drawFrame, linearScale } from "./svg.js";
import { SummaryRow, groupByEpsilon, groupLabel } from "./summary.js";

function niceStep(span: number, target = 5): number {
  const rough = span / target;
  const mag = 10 ** Math.floor(Math.log10(rough));
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rough) return m * mag;
  }
  return 10 * mag;
}

export function renderCurves(rows: SummaryRow[]): string {
  const groups = groupByEpsilon(rows);
  const episodes = rows.map((r) => r.episode);
  const eMin = Math.min(...episodes);
  const eMax = Math.max(...episodes);

  const doc = new SvgDoc();
  const { x0, x1, y0, yScale } = drawFrame(doc, "mean expected return");
  // degenerate single-episode summaries still get a sensible x axis
  const xScale =
    eMax > eMin ? linearScale(eMin, eMax, x0, x1) : () => (x0 + x1) / 2;

  if (eMax > eMin) {
    const step = niceStep(eMax - eMin);
    for (let t = Math.ceil(eMin / step) * step; t <= eMax; t += step) {
      doc.line(xScale(t), y0, xScale(t), y0 + 5, "#444444");
      doc.text(xScale(t), y0 + 20, t.toString(), "middle", 11);
    }
  } else {
    doc.text(xScale(eMin), y0 + 20, eMin.toString(), "middle", 11);
  }
  doc.text((x0 + x1) / 2, y0 + 40, "episode", "middle");

  let rank = 0;
  for (const [, g] of groups) {
    const color = PALETTE[rank % PALETTE.length];
    const upper: Array<[number, number]> = g.map((r) => [
      xScale(r.episode),
      yScale(clamp(r.ci95High, 0, 1)),
    ]);
    const lower: Array<[number, number]> = g.map((r) => [
      xScale(r.episode),
      yScale(clamp(r.ci95Low, 0, 1)),
    ]);
    doc.polygon([...upper, ...lower.reverse()], color, "ci-band", 0.18);
    doc.polyline(
      g.map((r) => [xScale(r.episode), yScale(clamp(r.meanReturn, 0, 1))]),
      color,
      "mean-line"
    );
    rank++;
  }

  // legend in the top-right corner, one swatch per group
  let row = 0;
  for (const [eps] of groups) {
    const color = PALETTE[row % PALETTE.length];
    const lx = x1 - 130;
    const ly = MARGIN.top + 8 + row * 18;
    doc.rect(lx, ly - 9, 12, 12, color, "legend-swatch");
    doc.text(lx + 18, ly + 1, groupLabel(eps), "start", 12);
    row++;
  }

  return doc.render();
}
