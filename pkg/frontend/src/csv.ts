import { readFileSync } from 'fs';

export interface Table {
  header: string[];
  /** Column name -> numeric values (non-numeric cells become NaN). */
  columns: Map<string, number[]>;
  /** Raw string cells for non-numeric columns (e.g. domain ids). */
  raw: Map<string, string[]>;
  rowCount: number;
}

export class SchemaError extends Error {}

/** Parse a comma-separated table with a header row; cells carry no quoting. */
export function readCsv(path: string): Table {
  const text = readFileSync(path, 'utf8');
  const lines = text.split('\n').filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`empty CSV file: ${path}`);
  }
  const header = lines[0].split(',').map((h) => h.trim());
  const columns = new Map<string, number[]>();
  const raw = new Map<string, string[]>();
  for (const name of header) {
    columns.set(name, []);
    raw.set(name, []);
  }
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(',');
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row ${i} of ${path} has ${cells.length} cells, expected ${header.length}`,
      );
    }
    header.forEach((name, j) => {
      const cell = cells[j].trim();
      raw.get(name)!.push(cell);
      columns.get(name)!.push(Number(cell));
    });
  }
  return { header, columns, raw, rowCount: lines.length - 1 };
}

/** Require columns to exist; the error names the first missing one. */
export function requireColumns(table: Table, names: string[], file: string): void {
  for (const name of names) {
    if (!table.columns.has(name)) {
      throw new SchemaError(`missing column '${name}' in ${file}`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  const values = table.columns.get(name);
  if (values === undefined) {
    throw new SchemaError(`missing column '${name}'`);
  }
  return values;
}
