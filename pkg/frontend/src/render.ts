/**
 * Chart rendering entry point: sweep CSV in, one SVG + one PNG per metric
 * out. Output bytes are a pure function of the CSV content.
 */

import * as fs from "fs";
import * as path from "path";

import { aggregate, Metric, XAxis } from "./aggregate.js";
import { buildLayout } from "./chart.js";
import { parseSweepCsv } from "./csv.js";
import { encodePng } from "./png.js";
import { rasterizeChart } from "./rasterize.js";
import { renderSvg } from "./svg.js";

export type XAxisKey = "k" | "l";

export interface ChartSpec {
  inputCsv: string;
  xAxis: XAxisKey;
  metrics?: Metric[];
  outDir: string;
}

const X_AXIS: Record<XAxisKey, XAxis> = { k: "K_active", l: "L" };
const X_LABEL: Record<XAxisKey, string> = {
  k: "active panels K",
  l: "elements per side L",
};
const METRIC_LABEL: Record<Metric, { title: string; yLabel: string; stem: string }> = {
  peb_m: { title: "Position error bound", yLabel: "PEB [m]", stem: "peb" },
  reb_rad: { title: "Rotation error bound", yLabel: "REB [rad]", stem: "reb" },
};

export function render(spec: ChartSpec): string[] {
  const text = fs.readFileSync(spec.inputCsv, "utf-8");
  const rows = parseSweepCsv(text);
  const metrics = spec.metrics ?? ["peb_m", "reb_rad"];

  fs.mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const metric of metrics) {
    const series = aggregate(rows, X_AXIS[spec.xAxis], metric);
    const meta = METRIC_LABEL[metric];
    const layout = buildLayout(
      series, `${meta.title} vs ${X_LABEL[spec.xAxis]}`,
      X_LABEL[spec.xAxis], meta.yLabel);

    const base = path.join(spec.outDir, `${meta.stem}_vs_${spec.xAxis}`);
    fs.writeFileSync(`${base}.svg`, renderSvg(layout));
    fs.writeFileSync(`${base}.png`, encodePng(rasterizeChart(layout)));
    written.push(`${base}.svg`, `${base}.png`);
  }
  return written;
}
