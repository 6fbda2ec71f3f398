// Tiny deterministic SVG builder: fixed figure size, fixed precision,
// no timestamps or generated ids, so equal input gives equal bytes.

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 24, right: 24, bottom: 56, left: 64 };

// color per epsilon rank, reused across both figures
export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

export function fmt(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (v: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

export class SvgDoc {
  private parts: string[] = [];

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1) {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, cls: string) {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline class="${cls}" points="${pts}" fill="none" ` +
        `stroke="${stroke}" stroke-width="1.8"/>`
    );
  }

  polygon(points: Array<[number, number]>, fill: string, cls: string, opacity: number) {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polygon class="${cls}" points="${pts}" fill="${fill}" ` +
        `fill-opacity="${opacity}" stroke="none"/>`
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string, cls: string) {
    this.parts.push(
      `<rect class="${cls}" x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
        `height="${fmt(h)}" fill="${fill}"/>`
    );
  }

  text(x: number, y: number, s: string, anchor: "start" | "middle" | "end", size = 12) {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
        `font-family="sans-serif" font-size="${size}" fill="#222">${escapeText(s)}</text>`
    );
  }

  raw(s: string) {
    this.parts.push(s);
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

// shared y axis: both figures plot a [0, 1] quantity
export function drawFrame(doc: SvgDoc, yLabel: string) {
  const { top, right, bottom, left } = MARGIN;
  const x0 = left;
  const x1 = WIDTH - right;
  const y0 = HEIGHT - bottom;
  const y1 = top;
  const yScale = linearScale(0, 1, y0, y1);
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const y = yScale(tick);
    doc.line(x0, y, x1, y, "#dddddd");
    doc.text(x0 - 8, y + 4, tick.toString(), "end", 11);
  }
  doc.line(x0, y0, x1, y0, "#444444");
  doc.line(x0, y0, x0, y1, "#444444");
  doc.raw(
    `<text x="${fmt(16)}" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="12" fill="#222" ` +
      `transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">${escapeText(yLabel)}</text>`
  );
  return { x0, x1, y0, y1, yScale };
}
