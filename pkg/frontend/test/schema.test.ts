import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { metaLines, parseCsvText, SchemaError } from "../src/schema";

const FIXTURES = join(__dirname, "..", "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

describe("parseCsvText", () => {
  it("parses a real checkpoint series with its configuration echo", () => {
    const parsed = parseCsvText(fixture("beta_35.csv"));
    expect(parsed.kind).toBe("series-real");
    expect(parsed.columns).toEqual(["n", "value"]);
    expect(parsed.meta["preset"]).toBe("beta_35");
    expect(parsed.meta["map.beta"]).toBe("0.35");
    expect(parsed.scaleMode).toBe("milli");
    expect(parsed.rows.length).toBeGreaterThan(1500);
    const ns = parsed.rows.map((r) => r[0]);
    for (let i = 1; i < ns.length; i++) expect(ns[i]).toBeGreaterThan(ns[i - 1]);
  });

  it("parses complex series and ensembles", () => {
    const wave = parseCsvText(fixture("wave_complex.csv"));
    expect(wave.kind).toBe("series-complex");
    expect(wave.columns).toEqual(["n", "re", "im"]);
    const walk = parseCsvText(fixture("walk_ensemble.csv"));
    expect(walk.kind).toBe("ensemble-complex");
    expect(walk.rows.length).toBe(50);
  });

  it("keeps absolute scale mode for the large-exponent preset", () => {
    expect(parseCsvText(fixture("beta_98.csv")).scaleMode).toBe("absolute");
  });

  it("rejects unknown headers", () => {
    expect(() => parseCsvText(fixture("bad_header.csv"))).toThrow(SchemaError);
  });

  it("rejects ragged and non-numeric rows", () => {
    expect(() => parseCsvText("n,value\n1,2,3\n")).toThrow(SchemaError);
    expect(() => parseCsvText("n,value\n1,abc\n")).toThrow(SchemaError);
    expect(() => parseCsvText("")).toThrow(SchemaError);
    expect(() => parseCsvText("# run.scale_mode = huge\nn,value\n1,2\n")).toThrow(
      SchemaError,
    );
  });

  it("accepts empty data sections (rendering rejects them later)", () => {
    const parsed = parseCsvText(fixture("empty_rows.csv"));
    expect(parsed.rows.length).toBe(0);
  });

  it("collects trailer comments separately", () => {
    const parsed = parseCsvText("# a = 1\nn,value\n1,0.5\n# aborted_at_step = 7\n");
    expect(parsed.meta["a"]).toBe("1");
    expect(parsed.trailer["aborted_at_step"]).toBe("7");
  });

  it("round-trips meta into metadata lines", () => {
    const lines = metaLines({ "map.beta": "0.35", note: "" });
    expect(lines).toContain("map.beta = 0.35");
    expect(lines).toContain("note");
  });
});
