/**
 * Readers for the two CSV contracts produced by the hallmhd package:
 *
 *  - sweep report, long format: header `gamma,t,metric,value`, one row per
 *    (gamma, time, metric) triple; whole-sweep scalars (slope_u, slope_B)
 *    are stored with gamma = 0.
 *  - run ledger, wide format: fixed header starting `t,energy,...` with
 *    one row per probe time.
 */

export class CsvError extends Error {}

export class MissingColumnError extends CsvError {
  constructor(public readonly column: string, contract: string) {
    super(`${contract} CSV is missing required column '${column}'`);
  }
}

export class NoDataRowsError extends CsvError {
  constructor(contract: string) {
    super(`${contract} CSV has no data rows`);
  }
}

/** Minimal CSV split: the contracts quote nothing and embed no commas. */
function splitLines(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0)
    .map((line) => line.split(",").map((c) => c.trim()));
}

function parseNumber(raw: string, where: string): number {
  const v = Number(raw);
  if (raw === "" || Number.isNaN(v)) {
    throw new CsvError(`cannot parse number ${JSON.stringify(raw)} ${where}`);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sweep report (long format)
// ---------------------------------------------------------------------------

export interface SweepRecord {
  gamma: number;
  t: number;
  metric: string;
  value: number;
}

export class SweepData {
  constructor(public readonly records: SweepRecord[]) {}

  /** Distinct per-run gamma values (excludes the gamma = 0 scalar rows). */
  gammas(): number[] {
    const set = new Set<number>();
    for (const r of this.records) if (r.gamma > 0) set.add(r.gamma);
    return [...set].sort((a, b) => b - a);
  }

  /** One scalar per gamma, from the t = 0 summary rows. */
  scalarByGamma(metric: string): Map<number, number> {
    const out = new Map<number, number>();
    for (const r of this.records) {
      if (r.metric === metric && r.gamma > 0 && r.t === 0) {
        out.set(r.gamma, r.value);
      }
    }
    return out;
  }

  /** Whole-sweep scalar (slope_u / slope_B rows carry gamma = 0). */
  sweepScalar(metric: string): number | undefined {
    const row = this.records.find((r) => r.metric === metric && r.gamma === 0);
    return row?.value;
  }

  /** Time series of one metric for one gamma, sorted by t. */
  series(gamma: number, metric: string): Array<{ t: number; value: number }> {
    return this.records
      .filter((r) => r.gamma === gamma && r.metric === metric)
      .map((r) => ({ t: r.t, value: r.value }))
      .sort((a, b) => a.t - b.t);
  }
}

export function parseSweepCsv(text: string): SweepData {
  const rows = splitLines(text);
  if (rows.length === 0) throw new NoDataRowsError("sweep");
  const header = rows[0];
  for (const col of ["gamma", "t", "metric", "value"]) {
    if (!header.includes(col)) throw new MissingColumnError(col, "sweep");
  }
  const idx = {
    gamma: header.indexOf("gamma"),
    t: header.indexOf("t"),
    metric: header.indexOf("metric"),
    value: header.indexOf("value"),
  };
  const records: SweepRecord[] = rows.slice(1).map((cells, i) => ({
    gamma: parseNumber(cells[idx.gamma], `in sweep row ${i + 2}`),
    t: parseNumber(cells[idx.t], `in sweep row ${i + 2}`),
    metric: cells[idx.metric],
    value: parseNumber(cells[idx.value], `in sweep row ${i + 2}`),
  }));
  if (records.length === 0) throw new NoDataRowsError("sweep");
  return new SweepData(records);
}

// ---------------------------------------------------------------------------
// Run ledger (wide format)
// ---------------------------------------------------------------------------

export const LEDGER_BAND_COLUMNS = [
  "band_ll",
  "band_lt",
  "band_mid",
  "band_gt",
  "band_gg",
] as const;

export interface LedgerRow {
  [column: string]: number;
}

export class LedgerData {
  constructor(
    public readonly columns: string[],
    public readonly rows: LedgerRow[],
  ) {}

  require(...columns: string[]): void {
    for (const c of columns) {
      if (!this.columns.includes(c)) {
        throw new MissingColumnError(c, "ledger");
      }
    }
  }

  column(name: string): number[] {
    this.require(name);
    return this.rows.map((r) => r[name]);
  }
}

export function parseLedgerCsv(text: string): LedgerData {
  const rows = splitLines(text);
  if (rows.length === 0) throw new NoDataRowsError("ledger");
  const header = rows[0];
  for (const col of ["t", "energy"]) {
    if (!header.includes(col)) throw new MissingColumnError(col, "ledger");
  }
  const data: LedgerRow[] = rows.slice(1).map((cells, i) => {
    const row: LedgerRow = {};
    header.forEach((name, j) => {
      row[name] = parseNumber(cells[j] ?? "", `in ledger row ${i + 2}`);
    });
    return row;
  });
  if (data.length === 0) throw new NoDataRowsError("ledger");
  return new LedgerData(header, data);
}
