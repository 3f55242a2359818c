/**
 * Loaders for the lab's CSV/JSONL artifacts.
 *
 * The upstream tool writes plain comma-separated tables without quoting, so
 * parsing is a strict split; any missing column fails loudly by name.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) throw new SchemaError("empty CSV file");
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(`row ${i + 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    return Object.fromEntries(columns.map((c, j) => [c, cells[j]]));
  });
  return { columns, rows };
}

export function requireColumns(table: Table, required: string[], file: string): void {
  for (const column of required) {
    if (!table.columns.includes(column)) {
      throw new SchemaError(`missing column '${column}' in ${file}`);
    }
  }
}

function numeric(row: Record<string, string>, column: string, file: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`non-numeric value '${row[column]}' in column '${column}' of ${file}`);
  }
  return value;
}

export interface CovarianceRow {
  s: number;
  t: number;
  empirical: number;
  theoretical: number;
  stdError: number;
}

export function loadCovariance(path: string): CovarianceRow[] {
  const table = parseCsv(readFileSync(path, "utf8"));
  requireColumns(table, ["s", "t", "empirical", "theoretical", "std_error"], path);
  return table.rows.map((row) => ({
    s: numeric(row, "s", path),
    t: numeric(row, "t", path),
    empirical: numeric(row, "empirical", path),
    theoretical: numeric(row, "theoretical", path),
    stdError: numeric(row, "std_error", path),
  }));
}

export interface MomentRow {
  l: number;
  n: number;
  size: number;
  exact: number;
  limit: number;
  gap: number;
}

export function loadMoments(path: string): MomentRow[] {
  const table = parseCsv(readFileSync(path, "utf8"));
  requireColumns(table, ["l", "n", "size", "exact", "limit", "gap"], path);
  return table.rows.map((row) => ({
    l: numeric(row, "l", path),
    n: numeric(row, "n", path),
    size: numeric(row, "size", path),
    exact: numeric(row, "exact", path),
    limit: numeric(row, "limit", path),
    gap: numeric(row, "gap", path),
  }));
}

export interface LongtimeReport {
  times: number[];
  empiricalVariances: number[];
  theoreticalVariances: number[];
  referenceSlope: number;
  fittedSlope: number;
  window: [number, number];
}

export function loadLongtime(path: string): LongtimeReport {
  const lines = readFileSync(path, "utf8")
    .split(/\r?\n/)
    .filter((line) => line.length > 0);
  const report = lines
    .map((line) => JSON.parse(line))
    .find((entry) => entry.name === "longtime_slope");
  if (!report) throw new SchemaError(`no 'longtime_slope' report in ${path}`);
  const meta = report.metadata ?? {};
  for (const key of [
    "times",
    "empirical_variances",
    "theoretical_variances",
    "reference_slope",
    "window",
  ]) {
    if (!(key in meta)) throw new SchemaError(`missing column '${key}' in ${path}`);
  }
  return {
    times: meta.times,
    empiricalVariances: meta.empirical_variances,
    theoreticalVariances: meta.theoretical_variances,
    referenceSlope: meta.reference_slope,
    fittedSlope: report.statistic,
    window: meta.window,
  };
}
