/**
 * Minimal 5x7 bitmap font for PNG axis labels: digits, the exponent and
 * punctuation tick labels need, and the lowercase letters used by the
 * column names.  Unknown characters render as a hollow box.
 */

const GLYPHS: Record<string, string[]> = {
  "0": ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
  "1": ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],
  "2": ["01110", "10001", "00001", "00010", "00100", "01000", "11111"],
  "3": ["11110", "00001", "00001", "01110", "00001", "00001", "11110"],
  "4": ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],
  "5": ["11111", "10000", "11110", "00001", "00001", "10001", "01110"],
  "6": ["00110", "01000", "10000", "11110", "10001", "10001", "01110"],
  "7": ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],
  "8": ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],
  "9": ["01110", "10001", "10001", "01111", "00001", "00010", "01100"],
  ".": ["00000", "00000", "00000", "00000", "00000", "01100", "01100"],
  "-": ["00000", "00000", "00000", "11111", "00000", "00000", "00000"],
  "+": ["00000", "00100", "00100", "11111", "00100", "00100", "00000"],
  "^": ["00100", "01010", "10001", "00000", "00000", "00000", "00000"],
  "_": ["00000", "00000", "00000", "00000", "00000", "00000", "11111"],
  " ": ["00000", "00000", "00000", "00000", "00000", "00000", "00000"],
  a: ["00000", "00000", "01110", "00001", "01111", "10001", "01111"],
  e: ["00000", "00000", "01110", "10001", "11111", "10000", "01110"],
  i: ["00100", "00000", "01100", "00100", "00100", "00100", "01110"],
  k: ["10000", "10000", "10010", "10100", "11000", "10100", "10010"],
  l: ["01100", "00100", "00100", "00100", "00100", "00100", "01110"],
  m: ["00000", "00000", "11010", "10101", "10101", "10101", "10101"],
  n: ["00000", "00000", "10110", "11001", "10001", "10001", "10001"],
  p: ["00000", "00000", "11110", "10001", "11110", "10000", "10000"],
  r: ["00000", "00000", "10110", "11001", "10000", "10000", "10000"],
  s: ["00000", "00000", "01111", "10000", "01110", "00001", "11110"],
  u: ["00000", "00000", "10001", "10001", "10001", "10011", "01101"],
  v: ["00000", "00000", "10001", "10001", "10001", "01010", "00100"],
  x: ["00000", "00000", "10001", "01010", "00100", "01010", "10001"],
};

const UNKNOWN = ["11111", "10001", "10001", "10001", "10001", "10001", "11111"];

export const GLYPH_W = 5;
export const GLYPH_H = 7;
export const ADVANCE = GLYPH_W + 1;

/** Call back once per lit pixel of `text` anchored at (x, y) top-left. */
export function eachTextPixel(
  text: string,
  x: number,
  y: number,
  plot: (px: number, py: number) => void,
): void {
  let cx = x;
  for (const ch of text) {
    const glyph = GLYPHS[ch] ?? GLYPHS[ch.toLowerCase()] ?? UNKNOWN;
    for (let r = 0; r < GLYPH_H; r++) {
      const rowBits = glyph[r];
      for (let c = 0; c < GLYPH_W; c++) {
        if (rowBits[c] === "1") plot(cx + c, y + r);
      }
    }
    cx += ADVANCE;
  }
}

export function textWidth(text: string): number {
  return text.length * ADVANCE - 1;
}
