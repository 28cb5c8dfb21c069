/**
 * Backend-independent chart layout: maps aggregated series onto pixel
 * coordinates with a linear x axis and a log10 y axis, and fixes all
 * styling (palette, sizes, legend order) so both output formats agree.
 */

import { Series } from "./aggregate.js";

export interface Pt {
  x: number;
  y: number;
}

export interface Tick {
  pos: number;
  label: string;
}

export interface SeriesLayout {
  mode: string;
  color: string;
  /** median polyline in pixel coordinates */
  line: Pt[];
  /** min-max band polygon (upper edge then reversed lower edge); empty if flat */
  band: Pt[];
}

export interface Layout {
  width: number;
  height: number;
  plot: { x0: number; y0: number; x1: number; y1: number };
  xTicks: Tick[];
  yTicks: Tick[];
  gridY: number[];
  series: SeriesLayout[];
  title: string;
  xLabel: string;
  yLabel: string;
}

export const WIDTH = 720;
export const HEIGHT = 480;
const MARGIN = { left: 86, right: 24, top: 42, bottom: 58 };

export const MODE_COLORS: Record<string, string> = {
  random: "#d62728",
  aligned: "#1f77b4",
  pso: "#2ca02c",
};
const FALLBACK_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

export function colorFor(mode: string, index: number): string {
  return MODE_COLORS[mode] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

function formatValue(v: number): string {
  const exp = Math.floor(Math.log10(v));
  const mant = v / 10 ** exp;
  if (Math.abs(mant - 1) < 1e-9) {
    return `1e${exp}`;
  }
  return `${mant.toPrecision(2)}e${exp}`;
}

export function buildLayout(series: Series[], title: string, xLabel: string,
                            yLabel: string): Layout {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("no series to lay out");
  }
  const xs = [...new Set(series.flatMap((s) => s.points.map((p) => p.x)))].sort(
    (a, b) => a - b);
  let xMin = xs[0];
  let xMax = xs[xs.length - 1];
  if (xMin === xMax) {
    xMin -= 0.5;
    xMax += 0.5;
  }

  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      lo = Math.min(lo, p.lo);
      hi = Math.max(hi, p.hi);
    }
  }
  if (!(lo > 0)) {
    throw new Error("log-scale axis requires strictly positive values");
  }
  // pad the log range a little so lines stay off the frame
  let logLo = Math.log10(lo);
  let logHi = Math.log10(hi);
  const pad = Math.max(0.05, 0.06 * (logHi - logLo));
  logLo -= pad;
  logHi += pad;

  const plot = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    x1: WIDTH - MARGIN.right,
    y1: HEIGHT - MARGIN.bottom,
  };
  const px = (x: number) =>
    plot.x0 + ((x - xMin) / (xMax - xMin)) * (plot.x1 - plot.x0);
  const py = (v: number) =>
    plot.y1 - ((Math.log10(v) - logLo) / (logHi - logLo)) * (plot.y1 - plot.y0);

  const xTicks: Tick[] = xs.map((x) => ({ pos: round2(px(x)), label: String(x) }));

  const yTicks: Tick[] = [];
  for (let e = Math.ceil(logLo); e <= Math.floor(logHi); e++) {
    yTicks.push({ pos: round2(py(10 ** e)), label: `1e${e}` });
  }
  if (yTicks.length < 2) {
    // less than one decade of spread: three geometric ticks
    yTicks.length = 0;
    for (const f of [0, 0.5, 1]) {
      const v = 10 ** (logLo + pad + f * (logHi - logLo - 2 * pad));
      yTicks.push({ pos: round2(py(v)), label: formatValue(v) });
    }
  }

  const laidOut: SeriesLayout[] = series.map((s, i) => {
    const line = s.points.map((p) => ({ x: round2(px(p.x)), y: round2(py(p.median)) }));
    const upper = s.points.map((p) => ({ x: round2(px(p.x)), y: round2(py(p.hi)) }));
    const lower = [...s.points].reverse().map(
      (p) => ({ x: round2(px(p.x)), y: round2(py(p.lo)) }));
    const flat = s.points.every((p) => p.lo === p.hi);
    return {
      mode: s.mode,
      color: colorFor(s.mode, i),
      line,
      band: flat || s.points.length < 2 ? [] : [...upper, ...lower],
    };
  });

  return {
    width: WIDTH,
    height: HEIGHT,
    plot,
    xTicks,
    yTicks,
    gridY: yTicks.map((t) => t.pos),
    series: laidOut,
    title,
    xLabel,
    yLabel,
  };
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
