/**
 * SVG backend: serializes a chart layout into a standalone SVG document.
 * Output depends only on the layout (no timestamps, ids, or random values).
 */

import { Layout, Pt } from "./chart.js";

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function pts(points: Pt[]): string {
  return points.map((p) => `${p.x},${p.y}`).join(" ");
}

export function renderSvg(layout: Layout): string {
  const { plot } = layout;
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" ` +
    `height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`);
  out.push(`<rect width="${layout.width}" height="${layout.height}" fill="white"/>`);
  out.push(
    `<text x="${layout.width / 2}" y="24" text-anchor="middle" font-size="16" ` +
    `${FONT}>${layout.title}</text>`);

  // gridlines and y ticks
  for (const tick of layout.yTicks) {
    out.push(
      `<line x1="${plot.x0}" y1="${tick.pos}" x2="${plot.x1}" y2="${tick.pos}" ` +
      `stroke="#dddddd" stroke-width="1"/>`);
    out.push(
      `<text x="${plot.x0 - 8}" y="${tick.pos + 4}" text-anchor="end" ` +
      `font-size="12" ${FONT}>${tick.label}</text>`);
  }
  // x ticks
  for (const tick of layout.xTicks) {
    out.push(
      `<line x1="${tick.pos}" y1="${plot.y1}" x2="${tick.pos}" y2="${plot.y1 + 5}" ` +
      `stroke="#333333" stroke-width="1"/>`);
    out.push(
      `<text x="${tick.pos}" y="${plot.y1 + 20}" text-anchor="middle" ` +
      `font-size="12" ${FONT}>${tick.label}</text>`);
  }

  // min-max bands under the lines
  for (const s of layout.series) {
    if (s.band.length > 0) {
      out.push(
        `<polygon class="series-band" points="${pts(s.band)}" fill="${s.color}" ` +
        `fill-opacity="0.18" stroke="none"/>`);
    }
  }
  // median lines and markers
  for (const s of layout.series) {
    out.push(
      `<polyline class="series-line" points="${pts(s.line)}" fill="none" ` +
      `stroke="${s.color}" stroke-width="2"/>`);
    for (const p of s.line) {
      out.push(
        `<circle class="series-marker" cx="${p.x}" cy="${p.y}" r="3.5" ` +
        `fill="${s.color}"/>`);
    }
  }

  // frame
  out.push(
    `<rect x="${plot.x0}" y="${plot.y0}" width="${plot.x1 - plot.x0}" ` +
    `height="${plot.y1 - plot.y0}" fill="none" stroke="#333333" stroke-width="1"/>`);

  // legend, top right inside the frame
  const lx = plot.x1 - 120;
  let ly = plot.y0 + 16;
  for (const s of layout.series) {
    out.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" ` +
      `stroke="${s.color}" stroke-width="2"/>`);
    out.push(
      `<text x="${lx + 32}" y="${ly}" font-size="12" ${FONT}>${s.mode}</text>`);
    ly += 18;
  }

  // axis labels
  out.push(
    `<text x="${(plot.x0 + plot.x1) / 2}" y="${layout.height - 14}" ` +
    `text-anchor="middle" font-size="13" ${FONT}>${layout.xLabel}</text>`);
  out.push(
    `<text x="20" y="${(plot.y0 + plot.y1) / 2}" text-anchor="middle" ` +
    `font-size="13" ${FONT} transform="rotate(-90 20 ${(plot.y0 + plot.y1) / 2})">` +
    `${layout.yLabel}</text>`);

  out.push("</svg>");
  return out.join("\n") + "\n";
}
