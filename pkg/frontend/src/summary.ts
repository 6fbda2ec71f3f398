// Reading and validating the sweep summary CSV.
//
// The file is looked up by column name, not position, so extra columns
// are tolerated; missing ones are reported together in a SchemaError.

import { readFileSync } from "node:fs";

export const REQUIRED_COLUMNS = [
  "epsilon",
  "episode",
  "mean_return",
  "ci95_low",
  "ci95_high",
  "optimal_frequency",
] as const;

export interface SummaryRow {
  epsilon: number;
  episode: number;
  meanReturn: number;
  ci95Low: number;
  ci95High: number;
  optimalFrequency: number;
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export function parseSummary(text: string): SummaryRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("summary is empty");
  }
  const header = lines[0].split(",");
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name.trim(), i));

  const missing = REQUIRED_COLUMNS.filter((c) => !index.has(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing columns: ${missing.join(", ")}`);
  }
  if (lines.length === 1) {
    throw new SchemaError("summary has no data rows");
  }

  const rows: SummaryRow[] = [];
  for (let ln = 1; ln < lines.length; ln++) {
    const parts = lines[ln].split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `line ${ln + 1}: expected ${header.length} fields, got ${parts.length}`
      );
    }
    const num = (col: string): number => {
      const raw = parts[index.get(col)!];
      const v = Number(raw);
      if (raw.trim() === "" || !Number.isFinite(v)) {
        throw new SchemaError(`line ${ln + 1}: ${col} is not a finite number (${raw})`);
      }
      return v;
    };
    const episode = num("episode");
    if (!Number.isInteger(episode)) {
      throw new SchemaError(`line ${ln + 1}: episode must be an integer (${episode})`);
    }
    rows.push({
      epsilon: num("epsilon"),
      episode,
      meanReturn: num("mean_return"),
      ci95Low: num("ci95_low"),
      ci95High: num("ci95_high"),
      optimalFrequency: num("optimal_frequency"),
    });
  }
  return rows;
}

export function readSummary(path: string): SummaryRow[] {
  return parseSummary(readFileSync(path, "utf-8"));
}

// Rows grouped per epsilon, each group sorted by episode, groups sorted
// by epsilon. This ordering is what fixes legend and color assignment.
export function groupByEpsilon(rows: SummaryRow[]): Map<number, SummaryRow[]> {
  const groups = new Map<number, SummaryRow[]>();
  for (const row of rows) {
    const g = groups.get(row.epsilon);
    if (g === undefined) {
      groups.set(row.epsilon, [row]);
    } else {
      g.push(row);
    }
  }
  const ordered = new Map<number, SummaryRow[]>();
  for (const eps of [...groups.keys()].sort((a, b) => a - b)) {
    ordered.set(
      eps,
      groups.get(eps)!.slice().sort((a, b) => a.episode - b.episode)
    );
  }
  return ordered;
}

export function groupLabel(epsilon: number): string {
  return epsilon === 0 ? "Normal" : `FGSM ε=${epsilon}`;
}

export function episodesOf(rows: SummaryRow[]): number[] {
  return [...new Set(rows.map((r) => r.episode))].sort((a, b) => a - b);
}

// Default snapshot for the bar figure: the recorded episode nearest to
// the middle of the observed range, ties broken toward the earlier one.
export function midpointEpisode(rows: SummaryRow[]): number {
  const eps = episodesOf(rows);
  const mid = (eps[0] + eps[eps.length - 1]) / 2;
  let best = eps[0];
  for (const e of eps) {
    if (Math.abs(e - mid) < Math.abs(best - mid)) best = e;
  }
  return best;
}

export function nearestEpisode(rows: SummaryRow[], target: number): number {
  const eps = episodesOf(rows);
  let best = eps[0];
  for (const e of eps) {
    if (Math.abs(e - target) < Math.abs(best - target)) best = e;
  }
  return best;
}
