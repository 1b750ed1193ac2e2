/**
 * Figure assembly: read a simulator CSV, honor its declared y-scale mode,
 * and write SVG/PNG line figures with the configuration embedded.
 */

import * as fs from "fs";
import * as path from "path";

import { buildLayout, FigureLayout } from "./layout";
import { layoutToPng } from "./png";
import { metaLines, ParsedCsv, parseCsvText, ScaleMode, SchemaError } from "./schema";
import { layoutToSvg } from "./svg";

export class RenderError extends Error {}

export type Format = "svg" | "png";

export interface FigureSpec {
  csvPath: string;
  outDir: string;
  formats: Format[];
  /** "auto" adopts the CSV's declared mode; an explicit mode must match it. */
  scaleMode: "auto" | ScaleMode;
  width: number;
  height: number;
}

export const DEFAULT_SPEC = {
  formats: ["svg", "png"] as Format[],
  scaleMode: "auto" as const,
  width: 960,
  height: 540,
};

export interface RenderOutcome {
  written: string[];
  scaleMode: ScaleMode;
}

function resolveScaleMode(spec: FigureSpec, parsed: ParsedCsv): ScaleMode {
  if (spec.scaleMode === "auto") {
    return parsed.scaleMode ?? "absolute";
  }
  if (parsed.scaleMode !== null && parsed.scaleMode !== spec.scaleMode) {
    throw new RenderError(
      `scale mode mismatch: CSV declares "${parsed.scaleMode}" but ` +
        `"${spec.scaleMode}" was requested`,
    );
  }
  return spec.scaleMode;
}

export function figureLayout(spec: FigureSpec, parsed: ParsedCsv, name: string): {
  layout: FigureLayout;
  scaleMode: ScaleMode;
} {
  if (parsed.kind === "ensemble-real" || parsed.kind === "ensemble-complex") {
    throw new RenderError(
      "ensemble CSVs carry samples, not a time series; nothing to plot against n",
    );
  }
  if (parsed.rows.length === 0) {
    throw new RenderError("CSV has no data rows");
  }
  const scaleMode = resolveScaleMode(spec, parsed);
  const factor = scaleMode === "milli" ? 1e3 : 1.0;
  const xs = parsed.rows.map((r) => r[0]);
  const valueColumns = parsed.columns.slice(1);
  const ys = valueColumns.map((_, ci) => parsed.rows.map((r) => r[ci + 1] * factor));
  const suffix = scaleMode === "milli" ? " x 10^-3" : "";
  const layout = buildLayout({
    width: spec.width,
    height: spec.height,
    xs,
    ys,
    lineNames: valueColumns,
    xLabel: parsed.columns[0],
    yLabel:
      (valueColumns.length > 1 ? "re, im" : valueColumns[0]) + suffix,
    metaText: metaLines(parsed.meta),
    sourceName: name,
  });
  return { layout, scaleMode };
}

export function renderFigure(spec: FigureSpec): RenderOutcome {
  let text: string;
  try {
    text = fs.readFileSync(spec.csvPath, "utf8");
  } catch (err) {
    throw new RenderError(`cannot read ${spec.csvPath}: ${(err as Error).message}`);
  }
  const parsed = parseCsvText(text); // SchemaError propagates
  const base = path.basename(spec.csvPath).replace(/\.csv$/i, "");
  const { layout, scaleMode } = figureLayout(spec, parsed, base);
  fs.mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const format of spec.formats) {
    const outPath = path.join(spec.outDir, `${base}.${format}`);
    if (format === "svg") {
      fs.writeFileSync(outPath, layoutToSvg(layout), "utf8");
    } else {
      fs.writeFileSync(outPath, layoutToPng(layout));
    }
    written.push(outPath);
  }
  return { written, scaleMode };
}

export { SchemaError };
