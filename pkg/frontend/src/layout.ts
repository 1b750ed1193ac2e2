/** Figure geometry shared by the SVG and PNG backends. */

export interface Tick {
  value: number;
  pixel: number;
  label: string;
}

export interface SeriesLine {
  name: string;
  points: Array<[number, number]>; // pixel coordinates
  color: string; // css color for svg; mapped to rgb for png
  dashed: boolean;
}

export interface FigureLayout {
  width: number;
  height: number;
  plot: { x0: number; y0: number; x1: number; y1: number };
  xTicks: Tick[];
  yTicks: Tick[];
  xLabel: string;
  yLabel: string;
  series: SeriesLine[];
  metaText: string[];
  sourceName: string;
}

const MARGIN = { left: 78, right: 24, top: 28, bottom: 52 };

/** Round a span to a 1/2/5 ladder step covering roughly `count` intervals. */
function niceStep(span: number, count: number): number {
  const raw = span / Math.max(count, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export function tickValues(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const step = niceStep(hi - lo, count);
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-12 * (hi - lo); v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) {
    return v.toExponential(2).replace("e+", "e");
  }
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/0+$/, "").replace(/\.$/, "") : s;
}

export interface LayoutInput {
  width: number;
  height: number;
  xs: number[];
  ys: number[][]; // one array per line, same length as xs
  lineNames: string[];
  xLabel: string;
  yLabel: string;
  metaText: string[];
  sourceName: string;
}

const COLORS = ["#1f4e9c", "#b03a2e"];

export function buildLayout(input: LayoutInput): FigureLayout {
  const { width, height, xs, ys } = input;
  const plot = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    x1: width - MARGIN.right,
    y1: height - MARGIN.bottom,
  };
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const line of ys) {
    for (const v of line) {
      if (v < yLo) yLo = v;
      if (v > yHi) yHi = v;
    }
  }
  if (!(yHi > yLo)) {
    const pad = Math.abs(yHi) > 0 ? Math.abs(yHi) * 0.5 : 1.0;
    yLo -= pad;
    yHi += pad;
  } else {
    const pad = (yHi - yLo) * 0.06;
    yLo -= pad;
    yHi += pad;
  }
  const sx = (v: number) =>
    xHi > xLo
      ? plot.x0 + ((v - xLo) / (xHi - xLo)) * (plot.x1 - plot.x0)
      : (plot.x0 + plot.x1) / 2;
  const sy = (v: number) => plot.y1 - ((v - yLo) / (yHi - yLo)) * (plot.y1 - plot.y0);
  const xTicks = tickValues(xLo, xHi, 6).map((v) => ({
    value: v,
    pixel: sx(v),
    label: formatTick(v),
  }));
  const yTicks = tickValues(yLo, yHi, 6).map((v) => ({
    value: v,
    pixel: sy(v),
    label: formatTick(v),
  }));
  const series: SeriesLine[] = ys.map((line, i) => ({
    name: input.lineNames[i],
    points: xs.map((x, j) => [sx(x), sy(line[j])] as [number, number]),
    color: COLORS[i % COLORS.length],
    dashed: i > 0,
  }));
  return {
    width,
    height,
    plot,
    xTicks,
    yTicks,
    xLabel: input.xLabel,
    yLabel: input.yLabel,
    series,
    metaText: input.metaText,
    sourceName: input.sourceName,
  };
}
