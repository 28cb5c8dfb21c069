/**
 * Raster backend: draws a chart layout onto an RGBA buffer using the same
 * geometry the SVG backend serializes.
 */

import { Layout } from "./chart.js";
import { hexColor, Raster } from "./raster.js";

const BLACK = hexColor("#333333");
const GRID = hexColor("#dddddd");
const WHITE = hexColor("#ffffff");

export function rasterizeChart(layout: Layout): Raster {
  const img = new Raster(layout.width, layout.height, WHITE);
  const { plot } = layout;

  img.text(layout.width / 2, 22, layout.title, BLACK, "center");

  for (const tick of layout.yTicks) {
    img.line(plot.x0, tick.pos, plot.x1, tick.pos, GRID, 1);
    img.text(plot.x0 - 8, tick.pos, tick.label, BLACK, "right");
  }
  for (const tick of layout.xTicks) {
    img.line(tick.pos, plot.y1, tick.pos, plot.y1 + 5, BLACK, 1);
    img.text(tick.pos, plot.y1 + 16, tick.label, BLACK, "center");
  }

  for (const s of layout.series) {
    if (s.band.length > 0) {
      img.fillPolygon(s.band, hexColor(s.color, 0.18));
    }
  }
  for (const s of layout.series) {
    const color = hexColor(s.color);
    for (let i = 0; i + 1 < s.line.length; i++) {
      img.line(s.line[i].x, s.line[i].y, s.line[i + 1].x, s.line[i + 1].y, color, 2);
    }
    for (const p of s.line) {
      img.disc(p.x, p.y, 3.5, color);
    }
  }

  // frame on top of the data
  img.line(plot.x0, plot.y0, plot.x1, plot.y0, BLACK, 1);
  img.line(plot.x0, plot.y1, plot.x1, plot.y1, BLACK, 1);
  img.line(plot.x0, plot.y0, plot.x0, plot.y1, BLACK, 1);
  img.line(plot.x1, plot.y0, plot.x1, plot.y1, BLACK, 1);

  const lx = plot.x1 - 120;
  let ly = plot.y0 + 16;
  for (const s of layout.series) {
    img.line(lx, ly, lx + 26, ly, hexColor(s.color), 2);
    img.text(lx + 32, ly, s.mode, BLACK, "left");
    ly += 18;
  }

  img.text((plot.x0 + plot.x1) / 2, layout.height - 14, layout.xLabel, BLACK, "center");
  img.text(20, Math.round((plot.y0 + plot.y1) / 2), layout.yLabel, BLACK, "center", true);

  return img;
}
