/**
 * Parser for the simulator's CSV schema.
 *
 * Layout: '#'-prefixed "key = value" comment lines (configuration echo),
 * one data header, numeric rows, then optional '#'-prefixed trailer lines
 * (e.g. abort markers). Recognized headers:
 *
 *   n,value | n,re,im       -- checkpoint series (real / complex)
 *   sample,value | sample,re,im -- ensemble samples
 *   k,value                 -- index series (renewal masses)
 */

export type CsvKind =
  | "series-real"
  | "series-complex"
  | "ensemble-real"
  | "ensemble-complex"
  | "index-real";

export type ScaleMode = "absolute" | "milli";

export interface ParsedCsv {
  meta: Record<string, string>;
  trailer: Record<string, string>;
  kind: CsvKind;
  columns: string[];
  rows: number[][];
  scaleMode: ScaleMode | null;
}

export class SchemaError extends Error {}

const HEADERS: Record<string, CsvKind> = {
  "n,value": "series-real",
  "n,re,im": "series-complex",
  "sample,value": "ensemble-real",
  "sample,re,im": "ensemble-complex",
  "k,value": "index-real",
};

function parseCommentLine(line: string, into: Record<string, string>): void {
  const body = line.slice(1).trim();
  if (body.length === 0) return;
  const eq = body.indexOf("=");
  if (eq < 0) {
    into[body] = "";
    return;
  }
  into[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
}

export function parseCsvText(text: string): ParsedCsv {
  const meta: Record<string, string> = {};
  const trailer: Record<string, string> = {};
  let kind: CsvKind | null = null;
  let columns: string[] = [];
  const rows: number[][] = [];
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      parseCommentLine(line, kind === null ? meta : trailer);
      continue;
    }
    if (kind === null) {
      const match = HEADERS[line];
      if (!match) {
        throw new SchemaError(
          `line ${i + 1}: unrecognized data header "${line}" ` +
            `(expected one of ${Object.keys(HEADERS).join(" | ")})`,
        );
      }
      kind = match;
      columns = line.split(",");
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `line ${i + 1}: expected ${columns.length} columns, got ${parts.length}`,
      );
    }
    const row = parts.map((p) => Number(p));
    if (row.some((v) => Number.isNaN(v))) {
      throw new SchemaError(`line ${i + 1}: non-numeric field in "${line}"`);
    }
    rows.push(row);
  }
  if (kind === null) {
    throw new SchemaError("no data header found");
  }
  let scaleMode: ScaleMode | null = null;
  const declared = meta["run.scale_mode"];
  if (declared === "milli" || declared === "absolute") {
    scaleMode = declared;
  } else if (declared !== undefined) {
    throw new SchemaError(`unknown declared scale mode "${declared}"`);
  }
  return { meta, trailer, kind, columns, rows, scaleMode };
}

export function metaLines(meta: Record<string, string>): string[] {
  return Object.entries(meta).map(([k, v]) => (v === "" ? k : `${k} = ${v}`));
}
