/**
 * The three comparison figures.  Each builder is a pure function from parsed
 * artifact rows to an SVG string; no statistics are recomputed here beyond
 * the +-3 SE band arithmetic needed for drawing.
 */

import { CovarianceRow, LongtimeReport, MomentRow, SchemaError } from "./data.js";
import { Figure, extent, linearScale, logScale, ticks } from "./svg.js";

const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function covarianceFigure(rows: CovarianceRow[]): string {
  const diagonal = rows.filter((r) => r.s === r.t).sort((a, b) => a.t - b.t);
  if (diagonal.length < 2) {
    throw new SchemaError("covariance figure needs at least two diagonal (s == t) rows");
  }
  const fig = new Figure(
    "Potential variance: ensemble vs limit law",
    "time",
    "Var V(t)",
  );
  const upper = diagonal.map((r) => r.empirical + 3 * r.stdError);
  const lower = diagonal.map((r) => r.empirical - 3 * r.stdError);
  const xDomain = extent(diagonal.map((r) => r.t), 0.02);
  const yDomain = extent([...upper, ...lower, ...diagonal.map((r) => r.theoretical), 0]);
  const { x, y } = fig.plotArea;
  const sx = linearScale(xDomain, x);
  const sy = linearScale(yDomain, y);
  fig.axes(sx, sy, ticks(...xDomain), ticks(...yDomain));
  fig.band(
    diagonal.map((r, i) => [sx(r.t), sy(upper[i])] as [number, number]),
    diagonal.map((r, i) => [sx(r.t), sy(lower[i])] as [number, number]),
    "#9ecae1",
  );
  fig.path(diagonal.map((r) => [sx(r.t), sy(r.theoretical)] as [number, number]), "#d62728", 2, "6 3");
  fig.path(diagonal.map((r) => [sx(r.t), sy(r.empirical)] as [number, number]), "#1f77b4");
  for (const r of diagonal) fig.marker(sx(r.t), sy(r.empirical), "#1f77b4");
  fig.legend([
    { label: "empirical (band: +-3 SE)", color: "#1f77b4" },
    { label: "theoretical", color: "#d62728", dash: "6 3" },
  ]);
  return fig.render();
}

export function momentsFigure(rows: MomentRow[]): string {
  if (rows.length === 0) throw new SchemaError("moments figure needs at least one row");
  const groups = new Map<string, MomentRow[]>();
  for (const row of rows) {
    const key = `l=${row.l}, n=${row.n}`;
    groups.set(key, [...(groups.get(key) ?? []), row]);
  }
  // exact cases produce zero gap; draw them at the plot floor
  const floor = 1e-17;
  const gaps = rows.map((r) => Math.max(Math.abs(r.gap), floor));
  const sizes = rows.map((r) => r.size);
  const fig = new Figure(
    "Moment gap to the Gaussian limit",
    "network size N (log)",
    "|exact - limit| (log)",
  );
  const xDomain: [number, number] = [Math.min(...sizes) / 1.3, Math.max(...sizes) * 1.3];
  const yDomain: [number, number] = [Math.min(...gaps) / 5, Math.max(...gaps, floor * 10) * 5];
  const { x, y } = fig.plotArea;
  const sx = logScale(xDomain, x);
  const sy = logScale(yDomain, y);
  const decades = (lo: number, hi: number) => {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi; e += 1) out.push(Math.pow(10, e));
    return out;
  };
  fig.axes(sx, sy, decades(...xDomain), decades(...yDomain), {
    yFmt: (v) => `1e${Math.round(Math.log10(v))}`,
  });
  let series = 0;
  const legend: { label: string; color: string }[] = [];
  for (const [label, group] of groups) {
    const color = SERIES_COLORS[series % SERIES_COLORS.length];
    const pts = group
      .slice()
      .sort((a, b) => a.size - b.size)
      .map((r) => [sx(r.size), sy(Math.max(Math.abs(r.gap), floor))] as [number, number]);
    fig.path(pts, color, 1.5);
    for (const [px, py] of pts) fig.marker(px, py, color, 3);
    legend.push({ label, color });
    series += 1;
  }
  fig.legend(legend);
  return fig.render();
}

export function longtimeFigure(report: LongtimeReport): string {
  const points = report.times
    .map((t, i) => ({ t, emp: report.empiricalVariances[i], th: report.theoreticalVariances[i] }))
    .filter((p) => p.t >= report.window[0] && p.t <= report.window[1] && p.emp > 0 && p.th > 0);
  if (points.length < 2) throw new SchemaError("longtime figure needs two positive-variance times");
  const fig = new Figure(
    "Long-time variance growth",
    "time",
    "log Var V(t)",
  );
  const logEmp = points.map((p) => Math.log(p.emp));
  const logTh = points.map((p) => Math.log(p.th));
  const xDomain = extent(points.map((p) => p.t), 0.02);
  const yDomain = extent([...logEmp, ...logTh]);
  const { x, y } = fig.plotArea;
  const sx = linearScale(xDomain, x);
  const sy = linearScale(yDomain, y);
  fig.axes(sx, sy, ticks(...xDomain), ticks(...yDomain));
  // reference slope line anchored at the first theoretical point
  const t0 = points[0].t;
  const ref0 = logTh[0];
  fig.path(
    points.map((p, i) => [sx(p.t), sy(ref0 + report.referenceSlope * (p.t - t0))] as [number, number]),
    "#2ca02c",
    1.5,
    "2 3",
  );
  fig.path(points.map((p, i) => [sx(p.t), sy(logTh[i])] as [number, number]), "#d62728", 2, "6 3");
  fig.path(points.map((p, i) => [sx(p.t), sy(logEmp[i])] as [number, number]), "#1f77b4");
  for (let i = 0; i < points.length; i += 1) fig.marker(sx(points[i].t), sy(logEmp[i]), "#1f77b4");
  fig.legend([
    { label: `empirical (fit slope ${report.fittedSlope.toFixed(3)})`, color: "#1f77b4" },
    { label: "theoretical", color: "#d62728", dash: "6 3" },
    { label: `reference slope ${report.referenceSlope.toFixed(3)}`, color: "#2ca02c", dash: "2 3" },
  ]);
  return fig.render();
}
