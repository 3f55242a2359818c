/**
 * Minimal deterministic SVG figure builder: fixed canvas, linear/log scales,
 * ticked axes, lines, bands and markers.  Output is a pure function of the
 * inputs (no timestamps, no randomness), so figures are byte-reproducible.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 24, bottom: 52, left: 72 };

export type Scale = (value: number) => number;

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (value) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  return (value) => inner(Math.log10(value));
}

export function extent(values: number[], padFraction = 0.05): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * padFraction;
  return [lo - pad, hi + pad];
}

export function ticks(lo: number, hi: number, count = 6): number[] {
  const rawStep = (hi - lo) / Math.max(count, 1);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * power).find((s) => (hi - lo) / s <= count) ?? power * 10;
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

const fmt = (value: number): string => {
  const rendered = Math.abs(value) >= 1e4 || (value !== 0 && Math.abs(value) < 1e-3)
    ? value.toExponential(1)
    : Number(value.toPrecision(6)).toString();
  return rendered;
};

export class Figure {
  private parts: string[] = [];

  constructor(public title: string, public xLabel: string, public yLabel: string) {}

  get plotArea(): { x: [number, number]; y: [number, number] } {
    return {
      x: [MARGIN.left, WIDTH - MARGIN.right],
      y: [HEIGHT - MARGIN.bottom, MARGIN.top],
    };
  }

  axes(xScale: Scale, yScale: Scale, xTicks: number[], yTicks: number[], opts?: { xFmt?: (v: number) => string; yFmt?: (v: number) => string }): void {
    const { x, y } = this.plotArea;
    const fx = opts?.xFmt ?? fmt;
    const fy = opts?.yFmt ?? fmt;
    this.parts.push(
      `<line x1="${x[0]}" y1="${y[0]}" x2="${x[1]}" y2="${y[0]}" stroke="#333" stroke-width="1"/>`,
      `<line x1="${x[0]}" y1="${y[0]}" x2="${x[0]}" y2="${y[1]}" stroke="#333" stroke-width="1"/>`,
    );
    for (const t of xTicks) {
      const px = xScale(t);
      this.parts.push(
        `<line x1="${px}" y1="${y[0]}" x2="${px}" y2="${y[0] + 5}" stroke="#333"/>`,
        `<text x="${px}" y="${y[0] + 20}" text-anchor="middle" font-size="12">${fx(t)}</text>`,
        `<line x1="${px}" y1="${y[0]}" x2="${px}" y2="${y[1]}" stroke="#ddd" stroke-width="0.5"/>`,
      );
    }
    for (const t of yTicks) {
      const py = yScale(t);
      this.parts.push(
        `<line x1="${x[0] - 5}" y1="${py}" x2="${x[0]}" y2="${py}" stroke="#333"/>`,
        `<text x="${x[0] - 8}" y="${py + 4}" text-anchor="end" font-size="12">${fy(t)}</text>`,
        `<line x1="${x[0]}" y1="${py}" x2="${x[1]}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`,
      );
    }
  }

  path(points: [number, number][], stroke: string, width = 2, dash = ""): void {
    const d = points.map(([px, py], i) => `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(`<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`);
  }

  band(upper: [number, number][], lower: [number, number][], fill: string): void {
    const pts = [...upper, ...[...lower].reverse()];
    const d = pts.map(([px, py], i) => `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`).join(" ") + " Z";
    this.parts.push(`<path d="${d}" fill="${fill}" stroke="none" opacity="0.35"/>`);
  }

  marker(px: number, py: number, color: string, radius = 3.5): void {
    this.parts.push(`<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="${radius}" fill="${color}"/>`);
  }

  legend(entries: { label: string; color: string; dash?: string }[]): void {
    const x0 = MARGIN.left + 12;
    let y0 = MARGIN.top + 8;
    for (const entry of entries) {
      const dashAttr = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
      this.parts.push(
        `<line x1="${x0}" y1="${y0}" x2="${x0 + 26}" y2="${y0}" stroke="${entry.color}" stroke-width="2.5"${dashAttr}/>`,
        `<text x="${x0 + 32}" y="${y0 + 4}" font-size="12">${entry.label}</text>`,
      );
      y0 += 18;
    }
  }

  render(): string {
    const { x, y } = this.plotArea;
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="${MARGIN.top - 16}" text-anchor="middle" font-size="15" font-weight="bold">${this.title}</text>`,
      `<text x="${(x[0] + x[1]) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${this.xLabel}</text>`,
      `<text x="18" y="${(y[0] + y[1]) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(y[0] + y[1]) / 2})">${this.yLabel}</text>`,
      ...this.parts,
      `</svg>`,
    ].join("\n");
  }
}
