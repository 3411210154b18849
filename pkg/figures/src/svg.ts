/** Small self-contained SVG chart toolkit (no DOM, string output). */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = {
  top: 40,
  right: 30,
  bottom: 55,
  left: 75,
};

export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

export type Scale = (value: number) => number;

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const lin = linearScale([lo, hi], range);
  return (v) => lin(Math.log10(v));
}

/** Round-number ticks for a linear axis. */
export function linearTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rawStep)!;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

/** Decade ticks for a log axis. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (
    let e = Math.floor(Math.log10(lo));
    e <= Math.ceil(Math.log10(hi));
    e++
  ) {
    const v = 10 ** e;
    if (v >= lo / 1.0001 && v <= hi * 1.0001) ticks.push(v);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10_000) {
    return Number(v.toPrecision(6)).toString();
  }
  return v.toExponential(0).replace("e-", "e-").replace("e+", "e");
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class SvgChart {
  private parts: string[] = [];

  constructor(
    public readonly width = 640,
    public readonly height = 440,
    public readonly margin: Margin = DEFAULT_MARGIN,
  ) {}

  get plotLeft(): number {
    return this.margin.left;
  }
  get plotRight(): number {
    return this.width - this.margin.right;
  }
  get plotTop(): number {
    return this.margin.top;
  }
  get plotBottom(): number {
    return this.height - this.margin.bottom;
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  title(text: string): void {
    this.parts.push(
      `<text x="${this.width / 2}" y="20" text-anchor="middle" ` +
        `font-size="15" font-weight="bold">${esc(text)}</text>`,
    );
  }

  axisLabels(xLabel: string, yLabel: string): void {
    this.parts.push(
      `<text x="${(this.plotLeft + this.plotRight) / 2}" ` +
        `y="${this.height - 12}" text-anchor="middle" font-size="13">` +
        `${esc(xLabel)}</text>`,
      `<text transform="rotate(-90)" x="${-(this.plotTop + this.plotBottom) / 2}" ` +
        `y="18" text-anchor="middle" font-size="13">${esc(yLabel)}</text>`,
    );
  }

  frame(): void {
    this.parts.push(
      `<rect x="${this.plotLeft}" y="${this.plotTop}" ` +
        `width="${this.plotRight - this.plotLeft}" ` +
        `height="${this.plotBottom - this.plotTop}" ` +
        `fill="none" stroke="#333"/>`,
    );
  }

  xTicks(values: number[], scale: Scale): void {
    for (const v of values) {
      const x = scale(v);
      this.parts.push(
        `<line x1="${x}" y1="${this.plotBottom}" x2="${x}" ` +
          `y2="${this.plotBottom + 5}" stroke="#333"/>`,
        `<text x="${x}" y="${this.plotBottom + 20}" text-anchor="middle" ` +
          `font-size="11">${esc(formatTick(v))}</text>`,
      );
    }
  }

  yTicks(values: number[], scale: Scale): void {
    for (const v of values) {
      const y = scale(v);
      this.parts.push(
        `<line x1="${this.plotLeft - 5}" y1="${y}" x2="${this.plotLeft}" ` +
          `y2="${y}" stroke="#333"/>`,
        `<text x="${this.plotLeft - 8}" y="${y + 4}" text-anchor="end" ` +
          `font-size="11">${esc(formatTick(v))}</text>`,
      );
    }
  }

  polyline(
    points: Array<[number, number]>,
    color: string,
    dash = "",
  ): void {
    const attr = dash ? ` stroke-dasharray="${dash}"` : "";
    const pts = points.map(([x, y]) => `${x},${y}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" ` +
        `stroke-width="1.8"${attr}/>`,
    );
  }

  markers(points: Array<[number, number]>, color: string): void {
    for (const [x, y] of points) {
      this.parts.push(`<circle cx="${x}" cy="${y}" r="3.2" fill="${color}"/>`);
    }
  }

  verticalLine(x: number, color: string, label: string): void {
    this.parts.push(
      `<line x1="${x}" y1="${this.plotTop}" x2="${x}" ` +
        `y2="${this.plotBottom}" stroke="${color}" stroke-width="1" ` +
        `stroke-dasharray="4 3"/>`,
      `<text x="${x + 3}" y="${this.plotTop + 12}" font-size="10" ` +
        `fill="${color}">${esc(label)}</text>`,
    );
  }

  legend(entries: Array<{ label: string; color: string }>): void {
    entries.forEach(({ label, color }, i) => {
      const y = this.plotTop + 8 + 16 * i;
      const x = this.plotRight - 170;
      this.parts.push(
        `<line x1="${x}" y1="${y}" x2="${x + 18}" y2="${y}" ` +
          `stroke="${color}" stroke-width="2.5"/>`,
        `<text x="${x + 24}" y="${y + 4}" font-size="11">${esc(label)}</text>`,
      );
    });
  }

  annotation(line: string, index = 0): void {
    this.parts.push(
      `<text x="${this.plotLeft + 10}" y="${this.plotTop + 16 + 16 * index}" ` +
        `font-size="12" font-family="monospace">${esc(line)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>` +
      this.parts.join("") +
      `</svg>`
    );
  }
}
