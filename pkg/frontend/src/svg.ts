/** Deterministic SVG emission for a computed figure layout. */

import { FigureLayout } from "./layout";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function px(v: number): string {
  return Number(v.toFixed(2)).toString();
}

export function layoutToSvg(layout: FigureLayout): string {
  const { plot } = layout;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" ` +
      `height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`,
  );
  // the source CSV's configuration header rides along as figure metadata
  parts.push("<desc>");
  for (const line of layout.metaText) parts.push(esc(line));
  parts.push("</desc>");
  parts.push(`<rect width="${layout.width}" height="${layout.height}" fill="white"/>`);
  const font = 'font-family="monospace"';
  // grid and ticks
  for (const t of layout.xTicks) {
    parts.push(
      `<line x1="${px(t.pixel)}" y1="${px(plot.y0)}" x2="${px(t.pixel)}" ` +
        `y2="${px(plot.y1)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(t.pixel)}" y="${px(plot.y1 + 18)}" ${font} font-size="11" ` +
        `text-anchor="middle">${esc(t.label)}</text>`,
    );
  }
  for (const t of layout.yTicks) {
    parts.push(
      `<line x1="${px(plot.x0)}" y1="${px(t.pixel)}" x2="${px(plot.x1)}" ` +
        `y2="${px(t.pixel)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(plot.x0 - 6)}" y="${px(t.pixel + 4)}" ${font} font-size="11" ` +
        `text-anchor="end">${esc(t.label)}</text>`,
    );
  }
  // frame
  parts.push(
    `<rect x="${px(plot.x0)}" y="${px(plot.y0)}" width="${px(plot.x1 - plot.x0)}" ` +
      `height="${px(plot.y1 - plot.y0)}" fill="none" stroke="black" stroke-width="1"/>`,
  );
  // series
  for (const s of layout.series) {
    const pts = s.points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
    const dash = s.dashed ? ' stroke-dasharray="5,4"' : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${s.color}" ` +
        `stroke-width="1.2"${dash} data-name="${esc(s.name)}"/>`,
    );
  }
  // legend for multi-line figures
  if (layout.series.length > 1) {
    let ly = plot.y0 + 14;
    for (const s of layout.series) {
      parts.push(
        `<line x1="${px(plot.x1 - 86)}" y1="${px(ly - 4)}" x2="${px(plot.x1 - 62)}" ` +
          `y2="${px(ly - 4)}" stroke="${s.color}" stroke-width="1.4"` +
          (s.dashed ? ' stroke-dasharray="5,4"' : "") +
          "/>",
      );
      parts.push(
        `<text x="${px(plot.x1 - 56)}" y="${px(ly)}" ${font} font-size="11">` +
          `${esc(s.name)}</text>`,
      );
      ly += 16;
    }
  }
  // axis labels and source line
  parts.push(
    `<text x="${px((plot.x0 + plot.x1) / 2)}" y="${px(layout.height - 14)}" ${font} ` +
      `font-size="12" text-anchor="middle">${esc(layout.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${px((plot.y0 + plot.y1) / 2)}" ${font} font-size="12" ` +
      `text-anchor="middle" transform="rotate(-90 16 ${px((plot.y0 + plot.y1) / 2)})">` +
      `${esc(layout.yLabel)}</text>`,
  );
  parts.push(
    `<text x="${px(plot.x0)}" y="16" ${font} font-size="11" fill="#444444">` +
      `${esc(layout.sourceName)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
