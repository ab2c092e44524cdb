import { readFileSync } from "node:fs";

import Papa from "papaparse";

import { SchemaMismatch } from "./errors.js";
import { tableColumns } from "./schema.js";

/** Divergent-kernel marker used by the producer. Parsed to null. */
export const DIVERGENT_CELL = "DIV";

export type Cell = number | string | null;

export interface Table {
  path: string;
  columns: string[];
  rows: Cell[][];
}

function parseCell(raw: string): Cell {
  if (raw === DIVERGENT_CELL) return null;
  if (raw === "") return null;
  const num = Number(raw);
  return Number.isNaN(num) ? raw : num;
}

/** Read one CSV table; numbers become numbers, DIV and empty become null. */
export function readTable(path: string): Table {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<string[]>(text.trimEnd(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaMismatch(`${path}: ${parsed.errors[0].message}`);
  }
  const [header, ...raw] = parsed.data;
  if (!header) {
    throw new SchemaMismatch(`${path}: empty file, expected a header row`);
  }
  const rows = raw.map((line, i) => {
    if (line.length !== header.length) {
      throw new SchemaMismatch(
        `${path} row ${i + 1}: ${line.length} cells, header has ${header.length}`,
      );
    }
    return line.map(parseCell);
  });
  return { path, columns: header, rows };
}

/**
 * Read a CSV and check it against the named table contract: required
 * columns all present, nothing outside the contract, at least one data row.
 */
export function readConforming(path: string, table: string): Table {
  const spec = tableColumns(table);
  const out = readTable(path);
  const optional = new Set(spec.optional ?? []);
  for (const col of spec.columns) {
    if (!out.columns.includes(col) && !optional.has(col)) {
      throw new SchemaMismatch(
        `${path}: missing column '${col}' required by the '${table}' schema`,
      );
    }
  }
  for (const col of out.columns) {
    if (!spec.columns.includes(col)) {
      throw new SchemaMismatch(
        `${path}: column '${col}' is not part of the '${table}' schema`,
      );
    }
  }
  if (out.rows.length === 0) {
    throw new SchemaMismatch(`${path}: no data rows`);
  }
  return out;
}

/** Column accessor; the column must exist (callers validate first). */
export function column(table: Table, name: string): Cell[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaMismatch(`${table.path}: no column '${name}'`);
  }
  return table.rows.map((row) => row[idx]);
}

export function numericColumn(table: Table, name: string): (number | null)[] {
  return column(table, name).map((cell) => {
    if (cell === null || typeof cell === "number") return cell;
    throw new SchemaMismatch(
      `${table.path}: column '${name}' holds non-numeric cell '${cell}'`,
    );
  });
}
