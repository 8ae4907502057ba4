import { readFileSync } from "node:fs";
import * as path from "node:path";
import { describe, expect, it } from "vitest";
import {
  BadMagic,
  NonFiniteValue,
  TruncatedPayload,
  ValidationError,
  VersionMismatch,
} from "../src/errors.js";
import { FeatureMeta, decodeRafs, encodeRafs, pooledFeatures, readRafs, tokenFeatures } from "../src/rafs.js";
import { TransformCondition } from "../src/transforms.js";
import { FIXTURES } from "./helpers.js";

function sampleMeta(): FeatureMeta {
  return {
    modelId: "toy-a",
    layerId: 1,
    condition: new TransformCondition("noise", 0.1, 42n),
    pooled: true,
    sourceImageCount: 6,
  };
}

describe("reference file compatibility", () => {
  it("decodes the pooled reference file with its metadata intact", () => {
    const fs = readRafs(path.join(FIXTURES, "sample.rafs"));
    expect(fs.n).toBe(6);
    expect(fs.d).toBe(4);
    expect(fs.t).toBe(0);
    expect(fs.clsPresent).toBe(false);
    expect(fs.meta.modelId).toBe("toy-a");
    expect(fs.meta.layerId).toBe(1);
    expect(fs.meta.pooled).toBe(true);
    expect(fs.meta.sourceImageCount).toBe(6);
    expect(fs.meta.condition?.family).toBe("noise");
    expect(fs.meta.condition?.parameter).toBe(0.1);
    expect(fs.meta.condition?.seed).toBe(42n);
  });

  it("re-encodes the pooled reference file byte-identically", () => {
    const raw = readFileSync(path.join(FIXTURES, "sample.rafs"));
    const fs = decodeRafs(raw, "sample.rafs");
    expect(encodeRafs(fs).equals(raw)).toBe(true);
  });

  it("decodes and re-encodes the token-level reference file with its class flag", () => {
    const raw = readFileSync(path.join(FIXTURES, "token_sample.rafs"));
    const fs = decodeRafs(raw, "token_sample.rafs");
    expect(fs.n).toBe(3);
    expect(fs.t).toBe(5);
    expect(fs.d).toBe(4);
    expect(fs.clsPresent).toBe(true);
    expect(fs.meta.pooled).toBe(false);
    expect(fs.meta.condition).toBeNull();
    expect(encodeRafs(fs).equals(raw)).toBe(true);
  });
});

describe("round trip", () => {
  it("pooled features survive encode/decode exactly", () => {
    const data = Float32Array.from([1.5, -2.25, 0, 3.125, 4.5, -0.75]);
    const fs = pooledFeatures(2, 3, data, sampleMeta());
    const back = decodeRafs(encodeRafs(fs));
    expect(back.n).toBe(2);
    expect(back.d).toBe(3);
    expect(Array.from(back.data)).toEqual(Array.from(data));
    expect(back.meta).toEqual(fs.meta);
  });

  it("token features keep shape and flags", () => {
    const data = new Float32Array(2 * 3 * 4).map((_, i) => i / 8);
    const fs = tokenFeatures(2, 3, 4, true, data, { ...sampleMeta(), pooled: false });
    const back = decodeRafs(encodeRafs(fs));
    expect([back.n, back.t, back.d]).toEqual([2, 3, 4]);
    expect(back.clsPresent).toBe(true);
  });
});

describe("validation", () => {
  const good = () => encodeRafs(pooledFeatures(2, 3, new Float32Array(6), sampleMeta()));

  it("rejects wrong magic", () => {
    const raw = good();
    raw[0] = 0x58;
    expect(() => decodeRafs(raw)).toThrow(BadMagic);
  });

  it("rejects a header cut short", () => {
    expect(() => decodeRafs(good().subarray(0, 40))).toThrow(TruncatedPayload);
  });

  it("rejects unknown versions", () => {
    const raw = good();
    raw.writeUInt16LE(2, 6);
    expect(() => decodeRafs(raw)).toThrow(VersionMismatch);
  });

  it("rejects nonzero reserved bytes", () => {
    const raw = good();
    raw[50] = 1;
    expect(() => decodeRafs(raw)).toThrow(VersionMismatch);
  });

  it("rejects unknown flag bits", () => {
    const raw = good();
    raw[32] = 0x02;
    expect(() => decodeRafs(raw)).toThrow(VersionMismatch);
  });

  it("rejects zero dimensions", () => {
    const raw = good();
    raw.writeBigUInt64LE(0n, 8);
    expect(() => decodeRafs(raw)).toThrow(ValidationError);
  });

  it("rejects truncated payloads, missing length fields, and short metadata", () => {
    const raw = good();
    expect(() => decodeRafs(raw.subarray(0, 70))).toThrow(TruncatedPayload);
    expect(() => decodeRafs(raw.subarray(0, 64 + 24))).toThrow(TruncatedPayload);
    expect(() => decodeRafs(raw.subarray(0, raw.length - 5))).toThrow(TruncatedPayload);
  });

  it("rejects trailing bytes", () => {
    const raw = Buffer.concat([good(), Buffer.from([0])]);
    expect(() => decodeRafs(raw)).toThrow(TruncatedPayload);
  });

  it("rejects non-JSON metadata", () => {
    const raw = good();
    raw[raw.length - 1] = 0x21;
    expect(() => decodeRafs(raw)).toThrow(ValidationError);
  });

  it("rejects non-finite payload values on encode and decode", () => {
    const bad = Float32Array.from([1, Number.NaN, 2, 3, 4, 5]);
    expect(() => encodeRafs(pooledFeatures(2, 3, bad, sampleMeta()))).toThrow(NonFiniteValue);
    const raw = good();
    raw.writeFloatLE(Number.POSITIVE_INFINITY, 64);
    expect(() => decodeRafs(raw)).toThrow(NonFiniteValue);
  });

  it("rejects shape mismatches at construction", () => {
    expect(() => pooledFeatures(2, 3, new Float32Array(5), sampleMeta())).toThrow(ValidationError);
    expect(() => pooledFeatures(0, 3, new Float32Array(0), sampleMeta())).toThrow(ValidationError);
    expect(() => tokenFeatures(2, 0, 3, false, new Float32Array(0), sampleMeta())).toThrow(ValidationError);
  });
});
