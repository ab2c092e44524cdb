import type { Cell, Table } from "../csv.js";
import { SchemaMismatch } from "../errors.js";
import { text } from "../svg.js";

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
];

export const EMPIRICAL_COLOR = "#74a9cf";
export const TRAINED_COLOR = "#fdae6b";
export const ANALYTIC_COLOR = "#08519c";
export const LIMIT_COLOR = "#d62728";
export const MEMBER_COLOR = "#999999";
export const BAND_FILL = "#fcbba1";

export function finiteExtent(values: (number | null)[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const series of values) {
    for (const v of series) {
      if (v === null || !Number.isFinite(v)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) {
    throw new SchemaMismatch("no finite values to plot");
  }
  return [lo, hi];
}

/** Unique cell values in first-seen order is never what we want; sort. */
export function sortedUnique(cells: Cell[]): number[] {
  const seen = new Set<number>();
  for (const c of cells) {
    if (typeof c === "number") seen.add(c);
  }
  return [...seen].sort((a, b) => a - b);
}

export function groupRows(
  table: Table,
  keyCols: string[],
): Map<string, number[]> {
  const idx = keyCols.map((c) => table.columns.indexOf(c));
  const groups = new Map<string, number[]>();
  table.rows.forEach((row, i) => {
    const key = idx.map((j) => String(row[j])).join(" ");
    const bucket = groups.get(key);
    if (bucket) bucket.push(i);
    else groups.set(key, [i]);
  });
  return groups;
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

export function legend(x: number, y: number, entries: LegendEntry[]): string {
  const parts: string[] = [];
  entries.forEach((entry, i) => {
    const ly = y + i * 16;
    const dash = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
    parts.push(
      `<line x1="${x}" y1="${ly}" x2="${x + 22}" y2="${ly}" stroke="${entry.color}" stroke-width="2"${dash}/>`,
      text(x + 28, ly + 3.5, entry.label),
    );
  });
  return parts.join("\n");
}
