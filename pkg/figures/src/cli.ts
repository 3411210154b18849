#!/usr/bin/env node
/**
 * Usage:
 *   hallmhd-figures gamma-convergence <sweep.csv> [-o out.svg]
 *   hallmhd-figures band-norms <ledger.csv> [-o out.svg]
 *   hallmhd-figures energy-ledger <ledger.csv> [-o out.svg]
 */

import { readFileSync, writeFileSync } from "node:fs";
import { CsvError } from "./csv.js";
import { bandNorms, energyLedger, gammaConvergence } from "./figures.js";

const DEFAULT_OUT: Record<string, string> = {
  "gamma-convergence": "gamma_convergence.svg",
  "band-norms": "band_norms.svg",
  "energy-ledger": "energy_ledger.svg",
};

export function run(argv: string[]): number {
  const [command, ...rest] = argv;
  if (!command || !(command in DEFAULT_OUT)) {
    process.stderr.write(
      "usage: hallmhd-figures <gamma-convergence|band-norms|energy-ledger>" +
        " <input.csv> [-o out.svg]\n",
    );
    return 2;
  }
  const oIdx = rest.indexOf("-o");
  const output = oIdx >= 0 ? rest[oIdx + 1] : DEFAULT_OUT[command];
  const input = rest.find((a, i) => a !== "-o" && i !== oIdx + 1);
  if (!input || !output) {
    process.stderr.write("missing input CSV path or -o value\n");
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    process.stderr.write(`cannot read ${input}: ${String(err)}\n`);
    return 2;
  }
  try {
    let svg: string;
    if (command === "gamma-convergence") {
      const result = gammaConvergence(text);
      svg = result.svg;
      process.stdout.write(
        `slope_u = ${result.slopeU.toFixed(9)}\n` +
          `slope_B = ${result.slopeB.toFixed(9)}\n`,
      );
    } else if (command === "band-norms") {
      svg = bandNorms(text);
    } else {
      svg = energyLedger(text);
    }
    writeFileSync(output, svg);
    process.stdout.write(`wrote ${output}\n`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`input error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(run(process.argv.slice(2)));
}
