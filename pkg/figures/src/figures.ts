/**
 * The three figure kinds built from the hallmhd CSV contracts:
 *
 *  - gammaConvergence: log-log sup-in-time errors vs gamma with the
 *    least-squares slope annotation (re-fit here with the same formula
 *    the producer uses, so the annotated value reproduces the report's).
 *  - bandNorms: the five frequency-band norms of B against time.
 *  - energyLedger: total energy and the two dissipation channels
 *    against time.
 */

import {
  CsvError,
  LEDGER_BAND_COLUMNS,
  LedgerData,
  SweepData,
  parseLedgerCsv,
  parseSweepCsv,
} from "./csv.js";
import { fitLoglogSlope } from "./fit.js";
import {
  SERIES_COLORS,
  SvgChart,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
} from "./svg.js";

export interface GammaConvergenceResult {
  svg: string;
  slopeU: number;
  slopeB: number;
}

function extent(values: number[]): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) throw new CsvError("no finite values to plot");
  return [Math.min(...finite), Math.max(...finite)];
}

function positiveExtent(values: number[]): [number, number] {
  const pos = values.filter((v) => Number.isFinite(v) && v > 0);
  if (pos.length === 0) throw new CsvError("no positive values to plot");
  return [Math.min(...pos), Math.max(...pos)];
}

// ---------------------------------------------------------------------------
// 1. gamma-convergence figure
// ---------------------------------------------------------------------------

export function gammaConvergence(sweepCsv: string): GammaConvergenceResult {
  const data: SweepData = parseSweepCsv(sweepCsv);
  const gammas = data.gammas();
  const errU = data.scalarByGamma("sup_err_u");
  const errB = data.scalarByGamma("sup_err_B");
  if (gammas.length === 0 || errU.size === 0 || errB.size === 0) {
    throw new CsvError(
      "sweep CSV has no sup_err_u / sup_err_B rows to plot",
    );
  }
  const gs = gammas.filter((g) => errU.has(g) && errB.has(g));
  const uVals = gs.map((g) => errU.get(g)!);
  const bVals = gs.map((g) => errB.get(g)!);
  const slopeU = fitLoglogSlope(gs, uVals);
  const slopeB = fitLoglogSlope(gs, bVals);

  const chart = new SvgChart();
  const [gLo, gHi] = positiveExtent(gs);
  const [eLo, eHi] = positiveExtent([...uVals, ...bVals]);
  const x = logScale([gLo / 1.3, gHi * 1.3], [chart.plotLeft, chart.plotRight]);
  const y = logScale([eLo / 2, eHi * 2], [chart.plotBottom, chart.plotTop]);

  chart.title("Convergence to the limit system");
  chart.frame();
  chart.xTicks(logTicks(gLo, gHi), x);
  chart.yTicks(logTicks(eLo, eHi), y);
  chart.axisLabels("gamma", "sup-in-time L2 error");

  const ptsU: Array<[number, number]> = gs.map((g, i) => [
    x(g),
    y(uVals[i]),
  ]);
  const ptsB: Array<[number, number]> = gs.map((g, i) => [
    x(g),
    y(bVals[i]),
  ]);
  chart.polyline(ptsU, SERIES_COLORS[0]);
  chart.markers(ptsU, SERIES_COLORS[0]);
  chart.polyline(ptsB, SERIES_COLORS[1], "5 3");
  chart.markers(ptsB, SERIES_COLORS[1]);
  chart.legend([
    { label: "velocity error", color: SERIES_COLORS[0] },
    { label: "magnetic error", color: SERIES_COLORS[1] },
  ]);
  chart.annotation(`slope_u = ${slopeU.toFixed(9)}`, 0);
  chart.annotation(`slope_B = ${slopeB.toFixed(9)}`, 1);
  return { svg: chart.render(), slopeU, slopeB };
}

// ---------------------------------------------------------------------------
// 2. band-norms figure
// ---------------------------------------------------------------------------

export interface BandThresholds {
  R?: number;
  shellLow?: number;
  shellHigh?: number;
  phi?: number;
}

export function bandNorms(
  ledgerCsv: string,
  thresholds: BandThresholds = {},
): string {
  const data: LedgerData = parseLedgerCsv(ledgerCsv);
  data.require("t", ...LEDGER_BAND_COLUMNS);
  const t = data.column("t");

  const chart = new SvgChart();
  const [tLo, tHi] = extent(t);
  const all = LEDGER_BAND_COLUMNS.flatMap((c) => data.column(c));
  const [, vHi] = extent(all);
  const x = linearScale([tLo, tHi], [chart.plotLeft, chart.plotRight]);
  const y = linearScale([0, vHi * 1.1 || 1], [chart.plotBottom, chart.plotTop]);

  chart.title("Frequency-band norms of B");
  chart.frame();
  chart.xTicks(linearTicks(tLo, tHi), x);
  chart.yTicks(linearTicks(0, vHi * 1.1 || 1), y);
  chart.axisLabels("t", "L2 norm per band");

  LEDGER_BAND_COLUMNS.forEach((col, i) => {
    const vals = data.column(col);
    chart.polyline(
      t.map((tv, k) => [x(tv), y(vals[k])] as [number, number]),
      SERIES_COLORS[i],
    );
  });
  chart.legend(
    LEDGER_BAND_COLUMNS.map((col, i) => ({
      label: col.replace("band_", "band "),
      color: SERIES_COLORS[i],
    })),
  );
  const th: Array<[string, number | undefined]> = [
    ["R", thresholds.R],
    ["shell/K", thresholds.shellLow],
    ["shell*K", thresholds.shellHigh],
    ["phi", thresholds.phi],
  ];
  let line = 0;
  for (const [name, value] of th) {
    if (value !== undefined) {
      chart.annotation(`${name} = ${value.toPrecision(6)}`, line++);
    }
  }
  return chart.render();
}

// ---------------------------------------------------------------------------
// 3. energy-ledger figure
// ---------------------------------------------------------------------------

export function energyLedger(ledgerCsv: string): string {
  const data: LedgerData = parseLedgerCsv(ledgerCsv);
  data.require("t", "energy", "grad_u_sq", "joule");
  const t = data.column("t");
  const series: Array<{ label: string; values: number[] }> = [
    { label: "energy", values: data.column("energy") },
    { label: "viscous dissipation", values: data.column("grad_u_sq") },
    { label: "resistive dissipation", values: data.column("joule") },
  ];

  const chart = new SvgChart();
  const [tLo, tHi] = extent(t);
  const [, vHi] = extent(series.flatMap((s) => s.values));
  const x = linearScale([tLo, tHi], [chart.plotLeft, chart.plotRight]);
  const y = linearScale([0, vHi * 1.1 || 1], [chart.plotBottom, chart.plotTop]);

  chart.title("Energy budget");
  chart.frame();
  chart.xTicks(linearTicks(tLo, tHi), x);
  chart.yTicks(linearTicks(0, vHi * 1.1 || 1), y);
  chart.axisLabels("t", "value");

  series.forEach((s, i) => {
    chart.polyline(
      t.map((tv, k) => [x(tv), y(s.values[k])] as [number, number]),
      SERIES_COLORS[i],
    );
  });
  chart.legend(
    series.map((s, i) => ({ label: s.label, color: SERIES_COLORS[i] })),
  );
  return chart.render();
}
