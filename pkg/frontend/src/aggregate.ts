/**
 * Seed aggregation: one series per phase mode, one point per x value, with
 * the median across the matching rows and the min-max spread as a band.
 *
 * Everything is sorted, so the output is independent of row order.
 */

import { SweepRow } from "./csv.js";

export type XAxis = "K_active" | "L";
export type Metric = "peb_m" | "reb_rad";

export interface SeriesPoint {
  x: number;
  median: number;
  lo: number;
  hi: number;
}

export interface Series {
  mode: string;
  points: SeriesPoint[];
}

/** Canonical legend/draw order; unknown modes follow alphabetically. */
const MODE_ORDER = ["random", "aligned", "pso"];

export function modeRank(mode: string): number {
  const i = MODE_ORDER.indexOf(mode);
  return i >= 0 ? i : MODE_ORDER.length;
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = sorted.length >> 1;
  return sorted.length % 2 === 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

function xOf(row: SweepRow, axis: XAxis): number {
  return axis === "K_active" ? row.kActive : row.l;
}

function metricOf(row: SweepRow, metric: Metric): number {
  return metric === "peb_m" ? row.pebM : row.rebRad;
}

export function aggregate(rows: SweepRow[], axis: XAxis, metric: Metric): Series[] {
  const buckets = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    let perX = buckets.get(row.phaseMode);
    if (!perX) {
      perX = new Map();
      buckets.set(row.phaseMode, perX);
    }
    const x = xOf(row, axis);
    let values = perX.get(x);
    if (!values) {
      values = [];
      perX.set(x, values);
    }
    values.push(metricOf(row, metric));
  }

  const modes = [...buckets.keys()].sort(
    (a, b) => modeRank(a) - modeRank(b) || a.localeCompare(b));

  return modes.map((mode) => {
    const perX = buckets.get(mode)!;
    const points = [...perX.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([x, values]) => ({
        x,
        median: median(values),
        lo: Math.min(...values),
        hi: Math.max(...values),
      }));
    return { mode, points };
  });
}
