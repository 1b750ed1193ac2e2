/**
 * PNG backend: rasterize the layout into an RGBA buffer (Bresenham lines,
 * bitmap-font labels), encode with pngjs, and append the CSV configuration
 * header as tEXt metadata chunks before IEND.
 */

import { PNG } from "pngjs";

import { ADVANCE, eachTextPixel, textWidth } from "./font";
import { FigureLayout } from "./layout";

type Rgb = [number, number, number];

const COLOR_TABLE: Record<string, Rgb> = {
  "#1f4e9c": [31, 78, 156],
  "#b03a2e": [176, 58, 46],
};

class Raster {
  readonly png: PNG;

  constructor(readonly width: number, readonly height: number) {
    this.png = new PNG({ width, height });
    this.png.data.fill(255);
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const at = (this.width * yi + xi) << 2;
    this.png.data[at] = r;
    this.png.data[at + 1] = g;
    this.png.data[at + 2] = b;
    this.png.data[at + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb, dashed = false): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    let step = 0;
    for (;;) {
      if (!dashed || step % 9 < 5) this.set(xa, ya, color);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
      step += 1;
    }
  }

  text(s: string, x: number, y: number, color: Rgb): void {
    eachTextPixel(s, Math.round(x), Math.round(y), (px, py) => this.set(px, py, color));
  }

  textVertical(s: string, x: number, y: number, color: Rgb): void {
    // rotated 90 degrees counterclockwise, one glyph at a time
    let cy = y;
    for (const ch of s) {
      eachTextPixel(ch, 0, 0, (px, py) => this.set(x + py, cy - px, color));
      cy -= ADVANCE;
    }
  }
}

const BLACK: Rgb = [0, 0, 0];
const GREY: Rgb = [221, 221, 221];
const DARK: Rgb = [68, 68, 68];

export function layoutToPng(layout: FigureLayout): Buffer {
  const r = new Raster(layout.width, layout.height);
  const { plot } = layout;
  for (const t of layout.xTicks) {
    r.line(t.pixel, plot.y0, t.pixel, plot.y1, GREY);
    r.text(t.label, t.pixel - textWidth(t.label) / 2, plot.y1 + 8, BLACK);
  }
  for (const t of layout.yTicks) {
    r.line(plot.x0, t.pixel, plot.x1, t.pixel, GREY);
    r.text(t.label, plot.x0 - 6 - textWidth(t.label), t.pixel - 3, BLACK);
  }
  r.line(plot.x0, plot.y0, plot.x1, plot.y0, BLACK);
  r.line(plot.x0, plot.y1, plot.x1, plot.y1, BLACK);
  r.line(plot.x0, plot.y0, plot.x0, plot.y1, BLACK);
  r.line(plot.x1, plot.y0, plot.x1, plot.y1, BLACK);
  for (const s of layout.series) {
    const rgb = COLOR_TABLE[s.color] ?? BLACK;
    for (let i = 1; i < s.points.length; i++) {
      const [xa, ya] = s.points[i - 1];
      const [xb, yb] = s.points[i];
      r.line(xa, ya, xb, yb, rgb, s.dashed);
    }
  }
  if (layout.series.length > 1) {
    let ly = plot.y0 + 10;
    for (const s of layout.series) {
      r.line(plot.x1 - 86, ly, plot.x1 - 62, ly, COLOR_TABLE[s.color] ?? BLACK, s.dashed);
      r.text(s.name, plot.x1 - 56, ly - 3, BLACK);
      ly += 14;
    }
  }
  r.text(
    layout.xLabel,
    (plot.x0 + plot.x1) / 2 - textWidth(layout.xLabel) / 2,
    layout.height - 18,
    BLACK,
  );
  r.textVertical(
    layout.yLabel,
    10,
    (plot.y0 + plot.y1) / 2 + textWidth(layout.yLabel) / 2,
    BLACK,
  );
  r.text(layout.sourceName, plot.x0, 10, DARK);
  const body = PNG.sync.write(r.png);
  return insertTextChunk(body, "globalobs-config", layout.metaText.join("\n"));
}

// -- tEXt injection ------------------------------------------------------

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

/** Insert one tEXt chunk right before IEND (keyword + latin-1 text). */
export function insertTextChunk(png: Buffer, keyword: string, text: string): Buffer {
  const payload = Buffer.concat([
    Buffer.from(keyword, "latin1"),
    Buffer.from([0]),
    Buffer.from(text.replace(/[^\x20-\x7e\n]/g, "?"), "latin1"),
  ]);
  const chunk = Buffer.alloc(12 + payload.length);
  chunk.writeUInt32BE(payload.length, 0);
  chunk.write("tEXt", 4, "latin1");
  payload.copy(chunk, 8);
  const crcBody = chunk.subarray(4, 8 + payload.length);
  chunk.writeUInt32BE(crc32(crcBody), 8 + payload.length);
  const iendAt = png.length - 12; // IEND is always the final 12 bytes
  return Buffer.concat([png.subarray(0, iendAt), chunk, png.subarray(iendAt)]);
}
