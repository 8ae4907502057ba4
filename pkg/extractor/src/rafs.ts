/** Binary container for feature matrices, byte-compatible with the consumer.
 *
 * Layout, little-endian throughout:
 *
 *     offset  size  field
 *     0       6     magic "RAFS1\0"
 *     6       2     format version, u16 (currently 1)
 *     8       8     n, u64
 *     16      8     d, u64
 *     24      8     t, u64 (0 means pooled; payload is then n*d)
 *     32      1     flags, u8 (bit 0: class token present at token index 0)
 *     33      31    reserved, must be zero
 *     64      -     payload, float32 row-major (sample, token, channel)
 *     ...     4     metadata length, u32
 *     ...     -     metadata, UTF-8 JSON, compact with sorted keys
 *
 * The writer produces the same bytes for the same features and metadata as
 * the consumer's writer, so digests agree across the pipeline boundary.
 */

import { readFileSync } from "node:fs";
import {
  BadMagic,
  NonFiniteValue,
  TruncatedPayload,
  ValidationError,
  VersionMismatch,
} from "./errors.js";
import type { JsonValue } from "./pyformat.js";
import { compactJson } from "./pyformat.js";
import { TransformCondition } from "./transforms.js";

export const MAGIC = Buffer.from("RAFS1\0", "latin1");
export const FORMAT_VERSION = 1;
export const HEADER_SIZE = 64;
const RESERVED_SIZE = 31;

/** Provenance carried with a feature matrix. */
export interface FeatureMeta {
  modelId: string;
  layerId: number;
  condition: TransformCondition | null;
  pooled: boolean;
  sourceImageCount: number;
}

export function defaultMeta(): FeatureMeta {
  return { modelId: "unknown", layerId: 0, condition: null, pooled: true, sourceImageCount: 0 };
}

function metaToJson(meta: FeatureMeta): JsonValue {
  return {
    model_id: meta.modelId,
    layer_id: BigInt(meta.layerId),
    condition: meta.condition ? meta.condition.toJson() : null,
    pooled: meta.pooled,
    source_image_count: BigInt(meta.sourceImageCount),
  };
}

function metaFromJson(obj: unknown): FeatureMeta {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ValidationError("metadata must be a JSON object");
  }
  const rec = obj as Record<string, unknown>;
  const cond = rec.condition;
  return {
    modelId: String(rec.model_id ?? "unknown"),
    layerId: Number(rec.layer_id ?? 0),
    condition: cond ? TransformCondition.fromJson(cond) : null,
    pooled: Boolean(rec.pooled ?? true),
    sourceImageCount: Number(rec.source_image_count ?? 0),
  };
}

/** A feature matrix plus provenance. Pooled sets have t === 0. */
export interface FeatureFile {
  n: number;
  d: number;
  /** tokens per sample; 0 means pooled */
  t: number;
  clsPresent: boolean;
  /** float32 payload, length n*d (pooled) or n*t*d (token-level) */
  data: Float32Array;
  meta: FeatureMeta;
}

export function pooledFeatures(n: number, d: number, data: Float32Array, meta: FeatureMeta): FeatureFile {
  if (n < 1 || d < 1) {
    throw new ValidationError("feature matrix needs n >= 1 and d >= 1");
  }
  if (data.length !== n * d) {
    throw new ValidationError(`payload holds ${data.length} values, expected ${n * d}`);
  }
  return { n, d, t: 0, clsPresent: false, data, meta };
}

export function tokenFeatures(
  n: number,
  t: number,
  d: number,
  clsPresent: boolean,
  data: Float32Array,
  meta: FeatureMeta,
): FeatureFile {
  if (n < 1 || t < 1 || d < 1) {
    throw new ValidationError("token features need n, t, d >= 1");
  }
  if (data.length !== n * t * d) {
    throw new ValidationError(`payload holds ${data.length} values, expected ${n * t * d}`);
  }
  return { n, t, d, clsPresent, data, meta };
}

/** Serialize one feature set to the container bytes. */
export function encodeRafs(fs: FeatureFile): Buffer {
  for (let i = 0; i < fs.data.length; i++) {
    if (!Number.isFinite(fs.data[i])) {
      throw new NonFiniteValue("feature payload contains NaN or Inf");
    }
  }
  const metaBytes = Buffer.from(compactJson(metaToJson(fs.meta)), "utf-8");
  const payload = Buffer.alloc(fs.data.length * 4);
  for (let i = 0; i < fs.data.length; i++) {
    payload.writeFloatLE(fs.data[i], i * 4);
  }
  const header = Buffer.alloc(HEADER_SIZE);
  MAGIC.copy(header, 0);
  header.writeUInt16LE(FORMAT_VERSION, 6);
  header.writeBigUInt64LE(BigInt(fs.n), 8);
  header.writeBigUInt64LE(BigInt(fs.d), 16);
  header.writeBigUInt64LE(BigInt(fs.t), 24);
  header.writeUInt8(fs.t > 0 && fs.clsPresent ? 1 : 0, 32);
  const metaLen = Buffer.alloc(4);
  metaLen.writeUInt32LE(metaBytes.length, 0);
  return Buffer.concat([header, payload, metaLen, metaBytes]);
}

/** Parse container bytes, enforcing every header and length rule. */
export function decodeRafs(raw: Buffer, name = "buffer"): FeatureFile {
  if (raw.length < MAGIC.length || !raw.subarray(0, MAGIC.length).equals(MAGIC)) {
    throw new BadMagic(`${name}: not a RAFS file`);
  }
  if (raw.length < HEADER_SIZE) {
    throw new TruncatedPayload(`${name}: header cut short at ${raw.length} bytes`);
  }
  const version = raw.readUInt16LE(6);
  if (version !== FORMAT_VERSION) {
    throw new VersionMismatch(`${name}: version ${version}, expected ${FORMAT_VERSION}`);
  }
  const nBig = raw.readBigUInt64LE(8);
  const dBig = raw.readBigUInt64LE(16);
  const tBig = raw.readBigUInt64LE(24);
  const flags = raw.readUInt8(32);
  for (let i = 33; i < HEADER_SIZE; i++) {
    if (raw[i] !== 0) {
      throw new VersionMismatch(`${name}: reserved header bytes are not zero`);
    }
  }
  if ((flags & ~0x01) !== 0) {
    throw new VersionMismatch(`${name}: unknown flag bits 0x${flags.toString(16).padStart(2, "0")}`);
  }
  if (nBig < 1n || dBig < 1n) {
    throw new ValidationError(`${name}: header declares n=${nBig}, d=${dBig}`);
  }
  const n = Number(nBig);
  const d = Number(dBig);
  const t = Number(tBig);
  const count = t === 0 ? n * d : n * t * d;
  const end = HEADER_SIZE + 4 * count;
  if (raw.length < end) {
    throw new TruncatedPayload(`${name}: payload needs ${end} bytes, file has ${raw.length}`);
  }
  if (raw.length < end + 4) {
    throw new TruncatedPayload(`${name}: metadata length field missing`);
  }
  const metaLen = raw.readUInt32LE(end);
  const metaEnd = end + 4 + metaLen;
  if (raw.length < metaEnd) {
    throw new TruncatedPayload(`${name}: metadata cut short`);
  }
  if (raw.length > metaEnd) {
    throw new TruncatedPayload(`${name}: ${raw.length - metaEnd} trailing bytes`);
  }
  let metaObj: unknown;
  try {
    metaObj = JSON.parse(raw.subarray(end + 4, metaEnd).toString("utf-8"));
  } catch (exc) {
    throw new ValidationError(`${name}: bad metadata block: ${(exc as Error).message}`);
  }
  const meta = metaFromJson(metaObj);
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = raw.readFloatLE(HEADER_SIZE + i * 4);
  }
  for (let i = 0; i < count; i++) {
    if (!Number.isFinite(data[i])) {
      throw new NonFiniteValue(`${name}: payload contains NaN or Inf`);
    }
  }
  if (t === 0) {
    return { n, d, t: 0, clsPresent: false, data, meta };
  }
  return { n, t, d, clsPresent: (flags & 1) === 1, data, meta };
}

export function readRafs(path: string): FeatureFile {
  return decodeRafs(readFileSync(path), path);
}
