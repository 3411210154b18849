import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  MissingColumnError,
  NoDataRowsError,
  parseLedgerCsv,
  parseSweepCsv,
} from "../src/csv.js";

const here = dirname(fileURLToPath(import.meta.url));
const sweepText = readFileSync(join(here, "fixtures", "sweep.csv"), "utf8");
const ledgerText = readFileSync(join(here, "fixtures", "ledger.csv"), "utf8");

describe("sweep CSV contract", () => {
  it("parses the long format produced by the simulation package", () => {
    const data = parseSweepCsv(sweepText);
    expect(data.gammas()).toEqual([0.5, 0.25, 0.125]);
    const errU = data.scalarByGamma("sup_err_u");
    expect(errU.size).toBe(3);
    for (const v of errU.values()) expect(v).toBeGreaterThan(0);
    expect(data.sweepScalar("slope_u")).toBeTypeOf("number");
  });

  it("exposes per-gamma time series sorted by t", () => {
    const data = parseSweepCsv(sweepText);
    const series = data.series(0.5, "err_B");
    expect(series.length).toBe(3); // t = 0, 0.025, 0.05
    expect(series[0].t).toBe(0);
    expect(series.at(-1)!.t).toBeCloseTo(0.05, 12);
    for (let i = 1; i < series.length; i++) {
      expect(series[i].t).toBeGreaterThan(series[i - 1].t);
    }
  });

  it("rejects a missing required column", () => {
    expect(() => parseSweepCsv("gamma,t,value\n0.5,0,1\n")).toThrow(
      MissingColumnError,
    );
    expect(() => parseSweepCsv("gamma,t,value\n0.5,0,1\n")).toThrow(
      /missing required column 'metric'/,
    );
  });

  it("rejects a header-only file", () => {
    expect(() => parseSweepCsv("gamma,t,metric,value\n")).toThrow(
      NoDataRowsError,
    );
    expect(() => parseSweepCsv("gamma,t,metric,value\n")).toThrow(
      /no data rows/,
    );
    expect(() => parseSweepCsv("")).toThrow(NoDataRowsError);
  });

  it("rejects unparseable numbers", () => {
    expect(() =>
      parseSweepCsv("gamma,t,metric,value\n0.5,0,sup_err_u,oops\n"),
    ).toThrow(/cannot parse number/);
  });
});

describe("run-ledger CSV contract", () => {
  it("parses the fixed wide schema", () => {
    const data = parseLedgerCsv(ledgerText);
    expect(data.columns[0]).toBe("t");
    expect(data.rows.length).toBe(11);
    const t = data.column("t");
    expect(t[0]).toBe(0);
    const energy = data.column("energy");
    for (let i = 1; i < energy.length; i++) {
      expect(energy[i]).toBeLessThanOrEqual(energy[i - 1]);
    }
  });

  it("rejects missing columns on demand", () => {
    const data = parseLedgerCsv("t,energy\n0,1\n");
    expect(() => data.require("band_mid")).toThrow(MissingColumnError);
    expect(() => data.column("joule")).toThrow(/'joule'/);
  });

  it("rejects header-only and empty files", () => {
    expect(() => parseLedgerCsv("t,energy\n")).toThrow(NoDataRowsError);
    expect(() => parseLedgerCsv("")).toThrow(NoDataRowsError);
  });
});
