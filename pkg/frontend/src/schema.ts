import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { SchemaMismatch } from "./errors.js";

interface TableSchema {
  columns: string[];
  optional?: string[];
  notes?: string;
}

interface SchemaFile {
  version: number;
  tables: Record<string, TableSchema>;
}

const schemaPath = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "schema",
  "csv_schema.json",
);

let cached: SchemaFile | undefined;

/** The pinned copy of the producer's column contract. */
export function columnContract(): SchemaFile {
  if (!cached) {
    cached = JSON.parse(readFileSync(schemaPath, "utf-8")) as SchemaFile;
  }
  return cached;
}

export function tableColumns(table: string): TableSchema {
  const entry = columnContract().tables[table];
  if (!entry) {
    throw new SchemaMismatch(`unknown table kind '${table}' in the schema file`);
  }
  return entry;
}

/** Assert that a referenced column exists in the named table's contract. */
export function checkColumnRef(table: string, column: string): void {
  const entry = tableColumns(table);
  if (!entry.columns.includes(column)) {
    throw new SchemaMismatch(
      `recipe references column '${column}' which is not in the '${table}' ` +
        `schema (has: ${entry.columns.join(", ")})`,
    );
  }
}
