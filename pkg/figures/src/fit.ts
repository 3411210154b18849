/**
 * Least-squares slope of log(error) against log(gamma).
 *
 * This is deliberately the same formula as the producing package
 * (centered x, slope = sum(xm * (y - ymean)) / sum(xm^2)) so the figure
 * annotation reproduces the printed slope exactly up to rounding.
 */

export function fitLoglogSlope(gammas: number[], errors: number[]): number {
  const pairs: Array<[number, number]> = [];
  for (let i = 0; i < gammas.length; i++) {
    const e = errors[i];
    if (Number.isFinite(e) && e > 0) pairs.push([gammas[i], e]);
  }
  if (pairs.length < 2) return Number.NaN;
  const x = pairs.map(([g]) => Math.log(g));
  const y = pairs.map(([, e]) => Math.log(e));
  const xMean = x.reduce((a, b) => a + b, 0) / x.length;
  const yMean = y.reduce((a, b) => a + b, 0) / y.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < x.length; i++) {
    const xm = x[i] - xMean;
    num += xm * (y[i] - yMean);
    den += xm * xm;
  }
  return num / den;
}
