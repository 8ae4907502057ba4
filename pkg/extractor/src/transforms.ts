/** Semantic-preserving image transformations and condition handling.
 *
 * The four families and their arithmetic match the consumer's reference
 * transforms operation for operation:
 *
 * - noise:    clamp(x + sigma * eps, 0, 1), eps from the counter PRNG keyed
 *             by the condition seed, pixel order row-major channel-innermost;
 * - scale:    bilinear resize to (round(s*H), round(s*W)) and back with
 *             half-pixel centers, every step in fixed-order float64;
 * - rotation: exact index permutation for multiples of 90 degrees;
 * - identity: pass-through.
 *
 * Identity parameters (sigma=0, s=1, theta=0 mod 360) return the input
 * object itself, and the noise field depends only on (seed, pixel index),
 * so both sides of the pipeline rebuild identical fields from a serialized
 * condition alone.
 */

import { ScaleTooSmall, ValidationError } from "./errors.js";
import { CHANNELS, ImageData } from "./image.js";
import type { JsonValue } from "./pyformat.js";
import { gFormat } from "./pyformat.js";
import { MASK64, deriveSeed, normalField } from "./rng.js";

export const FAMILIES = ["identity", "noise", "scale", "rotation"] as const;
export type Family = (typeof FAMILIES)[number];

export const NOISE_SIGMAS = [0.05, 0.1, 0.15, 0.2] as const;
export const SCALE_FACTORS = [0.25, 0.5, 0.75, 1.0] as const;
export const ROTATION_DEGREES = [0.0, 90.0, 180.0, 270.0] as const;

/** One perturbation: a family, its parameter, and a deterministic seed. */
export class TransformCondition {
  readonly family: Family;
  readonly parameter: number;
  readonly seed: bigint;

  constructor(family: string, parameter: number, seed: bigint) {
    if (!(FAMILIES as readonly string[]).includes(family)) {
      throw new ValidationError(`unknown transform family '${family}'`);
    }
    if (family === "rotation" && parameter % 90.0 !== 0.0) {
      throw new ValidationError("rotation angle must be a multiple of 90 degrees");
    }
    if (family === "noise" && !(parameter >= 0.0)) {
      throw new ValidationError("noise sigma must be non-negative");
    }
    if (family === "scale" && !(parameter > 0.0)) {
      throw new ValidationError("scale factor must be positive");
    }
    if (!Number.isFinite(parameter)) {
      throw new ValidationError("condition parameter must be finite");
    }
    if (seed < 0n || seed > MASK64) {
      throw new ValidationError("seed must fit in an unsigned 64-bit integer");
    }
    this.family = family as Family;
    this.parameter = parameter;
    this.seed = seed;
  }

  /** True when the transform is a bit-exact identity. */
  get isIdentityEquivalent(): boolean {
    if (this.family === "identity") {
      return true;
    }
    if (this.family === "noise") {
      return this.parameter === 0.0;
    }
    if (this.family === "scale") {
      return this.parameter === 1.0;
    }
    return this.parameter % 360.0 === 0.0;
  }

  label(): string {
    if (this.family === "identity") {
      return "identity";
    }
    return `${this.family}_${gFormat(this.parameter)}`;
  }

  toJson(): JsonValue {
    return { family: this.family, parameter: this.parameter, seed: this.seed };
  }

  static fromJson(obj: unknown): TransformCondition {
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
      throw new ValidationError("condition must be a JSON object");
    }
    const rec = obj as Record<string, unknown>;
    for (const key of ["family", "parameter", "seed"]) {
      if (!(key in rec)) {
        throw new ValidationError(`condition object missing key '${key}'`);
      }
    }
    return new TransformCondition(
      String(rec.family),
      Number(rec.parameter),
      parseSeed(rec.seed),
    );
  }
}

/** Read a 64-bit seed from JSON, where unsafe integers must arrive as strings. */
export function parseSeed(raw: unknown): bigint {
  if (typeof raw === "bigint") {
    return raw;
  }
  if (typeof raw === "number") {
    if (!Number.isInteger(raw)) {
      throw new ValidationError(`seed must be an integer, got ${raw}`);
    }
    if (Math.abs(raw) > Number.MAX_SAFE_INTEGER) {
      throw new ValidationError("seed exceeds exact integer range; pass it as a string");
    }
    return BigInt(raw);
  }
  if (typeof raw === "string" && /^\d+$/.test(raw)) {
    return BigInt(raw);
  }
  throw new ValidationError(`cannot parse seed ${JSON.stringify(raw)}`);
}

/** Canonical 13-condition suite: identity plus four members per family. */
export function defaultSuite(baseSeed: bigint = 0n): TransformCondition[] {
  const conds = [new TransformCondition("identity", 0.0, baseSeed & MASK64)];
  let idx = 1n;
  for (const sigma of NOISE_SIGMAS) {
    conds.push(new TransformCondition("noise", sigma, (baseSeed + idx) & MASK64));
    idx += 1n;
  }
  for (const s of SCALE_FACTORS) {
    conds.push(new TransformCondition("scale", s, (baseSeed + idx) & MASK64));
    idx += 1n;
  }
  for (const theta of ROTATION_DEGREES) {
    conds.push(new TransformCondition("rotation", theta, (baseSeed + idx) & MASK64));
    idx += 1n;
  }
  return conds;
}

/** Stable order: identity, noise, scale, rotation; parameter ascending. */
export function canonicalOrder(conds: readonly TransformCondition[]): TransformCondition[] {
  return [...conds].sort((a, b) => {
    const fam = FAMILIES.indexOf(a.family) - FAMILIES.indexOf(b.family);
    if (fam !== 0) {
      return fam;
    }
    if (a.parameter !== b.parameter) {
      return a.parameter < b.parameter ? -1 : 1;
    }
    return a.seed < b.seed ? -1 : a.seed > b.seed ? 1 : 0;
  });
}

export function suiteToJson(conds: readonly TransformCondition[]): JsonValue {
  return { conditions: conds.map((c) => c.toJson()) };
}

/** Parse a suite file: {"conditions": [{family, parameter, seed}, ...]}. */
export function suiteFromJson(obj: unknown): TransformCondition[] {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ValidationError("suite must be a JSON object with a 'conditions' list");
  }
  const rows = (obj as Record<string, unknown>).conditions;
  if (!Array.isArray(rows) || rows.length === 0) {
    throw new ValidationError("suite lists no conditions");
  }
  return rows.map((row) => TransformCondition.fromJson(row));
}

function roundHalfUp(x: number): number {
  return Math.floor(x + 0.5);
}

/** Half-pixel-center bilinear resample on a raw pixel buffer, edge-clamped
 * sampling, fixed-order float64. The output is NOT clamped to [0, 1]: the
 * convex combination can overshoot the unit range by an ulp, and the
 * reference pipeline clamps once at the end, so intermediate buffers must
 * keep those bits. */
export function resizeRaw(
  px: Float64Array,
  inH: number,
  inW: number,
  outH: number,
  outW: number,
): Float64Array {
  if (outH === inH && outW === inW) {
    return px.slice();
  }
  const ratioY = inH / outH;
  const ratioX = inW / outW;
  const y0 = new Int32Array(outH);
  const y1 = new Int32Array(outH);
  const fy = new Float64Array(outH);
  for (let y = 0; y < outH; y++) {
    let v = (y + 0.5) * ratioY - 0.5;
    v = Math.min(Math.max(v, 0.0), inH - 1.0);
    y0[y] = Math.floor(v);
    y1[y] = Math.min(y0[y] + 1, inH - 1);
    fy[y] = v - y0[y];
  }
  const x0 = new Int32Array(outW);
  const x1 = new Int32Array(outW);
  const fx = new Float64Array(outW);
  for (let x = 0; x < outW; x++) {
    let v = (x + 0.5) * ratioX - 0.5;
    v = Math.min(Math.max(v, 0.0), inW - 1.0);
    x0[x] = Math.floor(v);
    x1[x] = Math.min(x0[x] + 1, inW - 1);
    fx[x] = v - x0[x];
  }
  const out = new Float64Array(outH * outW * CHANNELS);
  for (let y = 0; y < outH; y++) {
    const rowA = y0[y] * inW;
    const rowB = y1[y] * inW;
    const wy = fy[y];
    for (let x = 0; x < outW; x++) {
      const colA = x0[x];
      const colB = x1[x];
      const wx = fx[x];
      for (let c = 0; c < CHANNELS; c++) {
        const p00 = px[(rowA + colA) * CHANNELS + c];
        const p01 = px[(rowA + colB) * CHANNELS + c];
        const p10 = px[(rowB + colA) * CHANNELS + c];
        const p11 = px[(rowB + colB) * CHANNELS + c];
        const top = (1.0 - wx) * p00 + wx * p01;
        const bot = (1.0 - wx) * p10 + wx * p11;
        out[(y * outW + x) * CHANNELS + c] = (1.0 - wy) * top + wy * bot;
      }
    }
  }
  return out;
}

function clampUnit(values: Float64Array): Float64Array {
  for (let i = 0; i < values.length; i++) {
    values[i] = Math.min(Math.max(values[i], 0.0), 1.0);
  }
  return values;
}

/** Resize a validated image, clamping the result back into the unit range. */
export function resizeImage(img: ImageData, outH: number, outW: number): ImageData {
  const out = resizeRaw(img.pixels, img.height, img.width, outH, outW);
  return new ImageData(outH, outW, clampUnit(out));
}

export function rotateQuarter(img: ImageData, quarter: number): ImageData {
  const { height: h, width: w, pixels: px } = img;
  const swap = quarter % 2 === 1;
  const outH = swap ? w : h;
  const outW = swap ? h : w;
  const out = new Float64Array(px.length);
  for (let y = 0; y < outH; y++) {
    for (let x = 0; x < outW; x++) {
      let sy: number;
      let sx: number;
      if (quarter === 1) {
        sy = x;
        sx = w - 1 - y;
      } else if (quarter === 2) {
        sy = h - 1 - y;
        sx = w - 1 - x;
      } else {
        sy = h - 1 - x;
        sx = y;
      }
      const src = (sy * w + sx) * CHANNELS;
      const dst = (y * outW + x) * CHANNELS;
      out[dst] = px[src];
      out[dst + 1] = px[src + 1];
      out[dst + 2] = px[src + 2];
    }
  }
  return new ImageData(outH, outW, out);
}

/** Apply one condition to an image. Identity parameters return the input. */
export function transformImage(img: ImageData, cond: TransformCondition): ImageData {
  if (cond.family === "identity") {
    return img;
  }
  if (cond.family === "noise") {
    const sigma = cond.parameter;
    if (sigma === 0.0) {
      return img;
    }
    const px = img.pixels;
    const eps = normalField(cond.seed, px.length);
    const out = new Float64Array(px.length);
    for (let i = 0; i < px.length; i++) {
      out[i] = Math.min(Math.max(px[i] + sigma * eps[i], 0.0), 1.0);
    }
    return new ImageData(img.height, img.width, out);
  }
  if (cond.family === "scale") {
    const s = cond.parameter;
    if (s === 1.0) {
      return img;
    }
    const hs = roundHalfUp(s * img.height);
    const ws = roundHalfUp(s * img.width);
    if (hs < 1 || ws < 1) {
      throw new ScaleTooSmall(
        `scale ${gFormat(s)} collapses a ${img.height}x${img.width} image below one pixel`,
      );
    }
    const small = resizeRaw(img.pixels, img.height, img.width, hs, ws);
    const back = resizeRaw(small, hs, ws, img.height, img.width);
    return new ImageData(img.height, img.width, clampUnit(back));
  }
  const quarter = Math.trunc(cond.parameter / 90.0) % 4;
  const positive = ((quarter % 4) + 4) % 4;
  if (positive === 0) {
    return img;
  }
  return rotateQuarter(img, positive);
}

/** Per-image condition within a corpus: noise derives a fresh seed per image,
 * seed-free families pass through unchanged. */
export function conditionForIndex(cond: TransformCondition, index: number): TransformCondition {
  if (cond.family === "noise" && cond.parameter !== 0.0) {
    return new TransformCondition(cond.family, cond.parameter, deriveSeed(cond.seed, BigInt(index)));
  }
  return cond;
}

/** Apply one condition across a corpus, image i under conditionForIndex(cond, i). */
export function transformCorpus(images: readonly ImageData[], cond: TransformCondition): ImageData[] {
  return images.map((img, i) => transformImage(img, conditionForIndex(cond, i)));
}
