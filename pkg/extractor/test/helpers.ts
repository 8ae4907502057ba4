import { readFileSync } from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

export const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

const VIEW = new DataView(new ArrayBuffer(8));

/** Decode a 16-hex-digit double bit pattern back into the exact double. */
export function bitsToDouble(hex: string): number {
  VIEW.setBigUint64(0, BigInt(`0x${hex}`));
  return VIEW.getFloat64(0);
}

/** Encode a double as its 16-hex-digit bit pattern. */
export function doubleToBits(v: number): string {
  VIEW.setFloat64(0, v);
  return VIEW.getBigUint64(0).toString(16).padStart(16, "0");
}

export interface ParityFixture {
  counter_hash: { seed: string; counter: string; hash: string }[];
  uniform01: { seed: string; counter: string; bits: string }[];
  norm_ppf: { p: string; x: string }[];
  normal_field: { seed: string; count: number; offset: string; bits: string[] }[];
  derive_seed: { seed: string; labels: string[]; derived: string }[];
  conditions: {
    suite_json: { family: string; parameter: number; seed: number }[];
    labels: string[];
    noise_seed_by_index: { index: number; seed: string }[];
    identity_seed_unchanged: string;
  };
  input_image: { shape: number[]; bits: string[] };
  transforms: {
    condition: { family: string; parameter: number; seed: number };
    in_shape: number[];
    out_shape: number[];
    pixels: string[];
  }[];
  formatting: { rows: { bits: string; repr: string; g: string; g9: string }[] };
  json: { compact_meta: string; canonical_manifest_b64: string; canonical_tricky_b64: string };
}

let cached: ParityFixture | null = null;

export function parity(): ParityFixture {
  if (!cached) {
    cached = JSON.parse(readFileSync(path.join(FIXTURES, "parity.json"), "utf-8")) as ParityFixture;
  }
  return cached;
}
