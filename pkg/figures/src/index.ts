export {
  CsvError,
  MissingColumnError,
  NoDataRowsError,
  SweepData,
  LedgerData,
  parseSweepCsv,
  parseLedgerCsv,
  LEDGER_BAND_COLUMNS,
} from "./csv.js";
export { fitLoglogSlope } from "./fit.js";
export {
  gammaConvergence,
  bandNorms,
  energyLedger,
  type BandThresholds,
  type GammaConvergenceResult,
} from "./figures.js";
