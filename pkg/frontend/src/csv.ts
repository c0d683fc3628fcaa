/**
 * Strict CSV reading for the simulator's artifact files.
 *
 * Files are plain comma-separated numeric tables with one header row.
 * Renderers never mutate their inputs, and every parse error names the
 * offending column or line so schema mismatches surface as actionable
 * diagnostics.
 */

export interface Table {
  columns: string[];
  /** column name -> values, row-aligned */
  data: Map<string, number[]>;
  rowCount: number;
}

export class CsvError extends Error {}

export function parseCsv(text: string, label = "csv"): Table {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${label}: file is empty`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (new Set(columns).size !== columns.length) {
    throw new CsvError(`${label}: duplicate column names in header`);
  }
  if (lines.length === 1) {
    throw new CsvError(`${label}: no data rows below the header`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `${label}: line ${i + 1} has ${cells.length} fields, expected ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const value = Number(cells[j]);
      if (!Number.isFinite(value)) {
        throw new CsvError(
          `${label}: line ${i + 1}, column '${columns[j]}': not a number (${cells[j].trim()})`,
        );
      }
      data.get(columns[j])!.push(value);
    }
  }
  return { columns, data, rowCount: lines.length - 1 };
}

/** Assert the table carries every required column, naming what is missing. */
export function requireColumns(table: Table, required: string[], label = "csv"): void {
  const missing = required.filter((c) => !table.data.has(c));
  if (missing.length > 0) {
    throw new CsvError(
      `${label}: missing column(s) ${missing.join(", ")}; found: ${table.columns.join(", ")}`,
    );
  }
}

export function column(table: Table, name: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new CsvError(`missing column '${name}'`);
  }
  return values;
}
