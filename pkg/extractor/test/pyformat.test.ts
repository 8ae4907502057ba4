import { describe, expect, it } from "vitest";
import { canonicalJson, compactJson, formatFloat, gFormat, pyRepr } from "../src/pyformat.js";
import { bitsToDouble, parity } from "./helpers.js";

describe("number formatting parity", () => {
  it("pyRepr matches the reference repr for every corpus double", () => {
    for (const row of parity().formatting.rows) {
      expect(pyRepr(bitsToDouble(row.bits)), row.repr).toBe(row.repr);
    }
  });

  it("gFormat matches the reference %g output", () => {
    for (const row of parity().formatting.rows) {
      expect(gFormat(bitsToDouble(row.bits)), row.g).toBe(row.g);
    }
  });

  it("formatFloat matches the reference nine-significant-digit form", () => {
    for (const row of parity().formatting.rows) {
      expect(formatFloat(bitsToDouble(row.bits)), row.g9).toBe(row.g9);
    }
  });
});

describe("JSON emitters", () => {
  it("compact JSON reproduces the reference metadata bytes", () => {
    const meta = {
      condition: { family: "noise", parameter: 0.1, seed: 42n },
      layer_id: 2n,
      model_id: "toy-a",
      pooled: true,
      source_image_count: 16n,
    };
    expect(compactJson(meta)).toBe(parity().json.compact_meta);
  });

  it("canonical JSON reproduces the reference manifest bytes", () => {
    const manifest = {
      kind: "se_cknna_manifest",
      conditions: [
        {
          condition: { family: "noise", parameter: 0.1, seed: 42n },
          a: "features/a_noise_0.1.rafs",
          b: "features/b_noise_0.1.rafs",
        },
        {
          condition: { family: "identity", parameter: 0.0, seed: 7n },
          a: "features/a_identity.rafs",
          b: "features/b_identity.rafs",
        },
      ],
    };
    expect(canonicalJson(manifest).toString("hex")).toBe(parity().json.canonical_manifest_b64);
  });

  it("canonical JSON handles escapes, empties, and float vs integer", () => {
    const tricky = {
      empty_list: [],
      empty_map: {},
      esc: 'a"b\\c\nd\tü☃',
      flag: true,
      nothing: null,
      numbers: [0.0, -0.0, 1.0, 0.1, 1e16, 1e-5, 123456789.123456789],
      whole: 42n,
    };
    expect(canonicalJson(tricky).toString("hex")).toBe(parity().json.canonical_tricky_b64);
  });

  it("integers and floats serialize distinctly", () => {
    expect(compactJson({ a: 1n })).toBe('{"a":1}');
    expect(compactJson({ a: 1.0 })).toBe('{"a":1.0}');
    expect(compactJson({ a: -0.0 })).toBe('{"a":-0.0}');
  });

  it("rejects non-finite floats", () => {
    expect(() => compactJson({ a: Number.NaN })).toThrow();
    expect(() => compactJson({ a: Number.POSITIVE_INFINITY })).toThrow();
  });
});
