/** Stand-in models for running extraction jobs without trained weights.
 *
 * Each model is a pure function of (seed, image): a fixed seeded projection
 * over a deterministic image summary. They exist so jobs, manifests, and the
 * downstream scorer can be exercised end to end; none of them approximates a
 * real network. Real models plug in through the same interface: preprocess
 * runs after the semantic transform, embed produces one layer's features.
 *
 * Registry:
 *   grid    - 8x8 per-cell channel means; reacts to any spatial change.
 *   sorted  - per-channel order statistics; quarter-turn rotations permute
 *             pixels within a channel, so its features are exactly rotation
 *             invariant on square inputs (it never resizes).
 *   token   - token-level output: one class token plus a 4x4 patch grid,
 *             exported un-pooled with the class flag set.
 *   latent  - small pooled code, the usual target for latent noising.
 */

import { ModelLoadFailure, ValidationError } from "./errors.js";
import { CHANNELS, ImageData } from "./image.js";
import { deriveSeed, normalField } from "./rng.js";
import { resizeImage } from "./transforms.js";

// substream label for projection matrices
const LBL_PROJECTION = 3n;

export interface StandInModel {
  /** canonical spec string, e.g. "grid#7" */
  readonly id: string;
  readonly layerCount: number;
  readonly pooled: boolean;
  /** tokens per sample for token-level models, 0 when pooled */
  readonly tokenCount: number;
  readonly clsPresent: boolean;
  readonly dim: number;
  /** model-side preprocessing; runs after the semantic transform */
  preprocess(img: ImageData): ImageData;
  /** features for one preprocessed image; length dim, or tokenCount*dim for token models */
  embed(img: ImageData, layer: number): Float64Array;
}

function checkLayer(layer: number, count: number, id: string): void {
  if (!Number.isInteger(layer) || layer < 0 || layer >= count) {
    throw new ValidationError(`model ${id} has ${count} layers, layer ${layer} does not exist`);
  }
}

function projection(seed: bigint, layer: number, rows: number, cols: number): Float64Array {
  const mat = normalField(deriveSeed(seed, LBL_PROJECTION, BigInt(layer)), rows * cols);
  const scale = 1 / Math.sqrt(cols);
  for (let i = 0; i < mat.length; i++) {
    mat[i] *= scale;
  }
  return mat;
}

function applyTanh(mat: Float64Array, rows: number, cols: number, vec: Float64Array): Float64Array {
  const out = new Float64Array(rows);
  for (let r = 0; r < rows; r++) {
    let acc = 0;
    const base = r * cols;
    for (let c = 0; c < cols; c++) {
      acc += mat[base + c] * vec[c];
    }
    out[r] = Math.tanh(acc);
  }
  return out;
}

function gridMeans(img: ImageData, grid: number): Float64Array {
  const { height: h, width: w, pixels: px } = img;
  if (h < grid || w < grid) {
    throw new ValidationError(`grid summary needs at least ${grid}x${grid} pixels, got ${h}x${w}`);
  }
  const out = new Float64Array(grid * grid * CHANNELS);
  for (let gy = 0; gy < grid; gy++) {
    const yLo = Math.floor((gy * h) / grid);
    const yHi = Math.floor(((gy + 1) * h) / grid);
    for (let gx = 0; gx < grid; gx++) {
      const xLo = Math.floor((gx * w) / grid);
      const xHi = Math.floor(((gx + 1) * w) / grid);
      const count = (yHi - yLo) * (xHi - xLo);
      for (let c = 0; c < CHANNELS; c++) {
        let acc = 0;
        for (let y = yLo; y < yHi; y++) {
          for (let x = xLo; x < xHi; x++) {
            acc += px[(y * w + x) * CHANNELS + c];
          }
        }
        out[(gy * grid + gx) * CHANNELS + c] = acc / count;
      }
    }
  }
  return out;
}

function orderStats(img: ImageData, perChannel: number): Float64Array {
  const { height: h, width: w, pixels: px } = img;
  const count = h * w;
  const out = new Float64Array(perChannel * CHANNELS);
  const channel = new Float64Array(count);
  for (let c = 0; c < CHANNELS; c++) {
    for (let i = 0; i < count; i++) {
      channel[i] = px[i * CHANNELS + c];
    }
    channel.sort();
    for (let i = 0; i < perChannel; i++) {
      const pos = Math.floor((i * (count - 1)) / (perChannel - 1));
      out[c * perChannel + i] = channel[pos];
    }
  }
  return out;
}

class GridModel implements StandInModel {
  readonly layerCount = 4;
  readonly pooled = true;
  readonly tokenCount = 0;
  readonly clsPresent = false;
  readonly dim = 24;
  private static readonly GRID = 8;
  private static readonly INPUT = 32;
  private static readonly SUMMARY = GridModel.GRID * GridModel.GRID * CHANNELS;

  constructor(readonly id: string, private readonly seed: bigint) {}

  preprocess(img: ImageData): ImageData {
    return resizeImage(img, GridModel.INPUT, GridModel.INPUT);
  }

  embed(img: ImageData, layer: number): Float64Array {
    checkLayer(layer, this.layerCount, this.id);
    const summary = gridMeans(img, GridModel.GRID);
    const mat = projection(this.seed, layer, this.dim, GridModel.SUMMARY);
    return applyTanh(mat, this.dim, GridModel.SUMMARY, summary);
  }
}

class SortedModel implements StandInModel {
  readonly layerCount = 4;
  readonly pooled = true;
  readonly tokenCount = 0;
  readonly clsPresent = false;
  readonly dim = 24;
  private static readonly PER_CHANNEL = 64;
  private static readonly SUMMARY = SortedModel.PER_CHANNEL * CHANNELS;

  constructor(readonly id: string, private readonly seed: bigint) {}

  // size-agnostic on purpose: resizing would break exact rotation invariance
  preprocess(img: ImageData): ImageData {
    return img;
  }

  embed(img: ImageData, layer: number): Float64Array {
    checkLayer(layer, this.layerCount, this.id);
    const summary = orderStats(img, SortedModel.PER_CHANNEL);
    const mat = projection(this.seed, layer, this.dim, SortedModel.SUMMARY);
    return applyTanh(mat, this.dim, SortedModel.SUMMARY, summary);
  }
}

class TokenModel implements StandInModel {
  readonly layerCount = 2;
  readonly pooled = false;
  readonly clsPresent = true;
  readonly dim = 12;
  private static readonly PATCH_GRID = 4;
  private static readonly INPUT = 16;
  // per-token input: channel means, normalized grid position, bias
  private static readonly TOKEN_IN = CHANNELS + 3;

  readonly tokenCount = TokenModel.PATCH_GRID * TokenModel.PATCH_GRID + 1;

  constructor(readonly id: string, private readonly seed: bigint) {}

  preprocess(img: ImageData): ImageData {
    return resizeImage(img, TokenModel.INPUT, TokenModel.INPUT);
  }

  embed(img: ImageData, layer: number): Float64Array {
    checkLayer(layer, this.layerCount, this.id);
    const grid = TokenModel.PATCH_GRID;
    const cells = gridMeans(img, grid);
    const mat = projection(this.seed, layer, this.dim, TokenModel.TOKEN_IN);
    const out = new Float64Array(this.tokenCount * this.dim);
    const vec = new Float64Array(TokenModel.TOKEN_IN);
    // class token summarizes the whole image
    let rBar = 0;
    let gBar = 0;
    let bBar = 0;
    for (let i = 0; i < grid * grid; i++) {
      rBar += cells[i * CHANNELS];
      gBar += cells[i * CHANNELS + 1];
      bBar += cells[i * CHANNELS + 2];
    }
    vec[0] = rBar / (grid * grid);
    vec[1] = gBar / (grid * grid);
    vec[2] = bBar / (grid * grid);
    vec[3] = 0;
    vec[4] = 0;
    vec[5] = 1;
    out.set(applyTanh(mat, this.dim, TokenModel.TOKEN_IN, vec), 0);
    for (let gy = 0; gy < grid; gy++) {
      for (let gx = 0; gx < grid; gx++) {
        const cell = gy * grid + gx;
        vec[0] = cells[cell * CHANNELS];
        vec[1] = cells[cell * CHANNELS + 1];
        vec[2] = cells[cell * CHANNELS + 2];
        vec[3] = gy / grid;
        vec[4] = gx / grid;
        vec[5] = 1;
        out.set(applyTanh(mat, this.dim, TokenModel.TOKEN_IN, vec), (cell + 1) * this.dim);
      }
    }
    return out;
  }
}

class LatentModel implements StandInModel {
  readonly layerCount = 1;
  readonly pooled = true;
  readonly tokenCount = 0;
  readonly clsPresent = false;
  readonly dim = 16;
  private static readonly GRID = 4;
  private static readonly INPUT = 16;
  private static readonly SUMMARY = LatentModel.GRID * LatentModel.GRID * CHANNELS;

  constructor(readonly id: string, private readonly seed: bigint) {}

  preprocess(img: ImageData): ImageData {
    return resizeImage(img, LatentModel.INPUT, LatentModel.INPUT);
  }

  embed(img: ImageData, layer: number): Float64Array {
    checkLayer(layer, this.layerCount, this.id);
    const summary = gridMeans(img, LatentModel.GRID);
    const mat = projection(this.seed, layer, this.dim, LatentModel.SUMMARY);
    return applyTanh(mat, this.dim, LatentModel.SUMMARY, summary);
  }
}

export const BUILDERS: Record<string, (id: string, seed: bigint) => StandInModel> = {
  grid: (id, seed) => new GridModel(id, seed),
  sorted: (id, seed) => new SortedModel(id, seed),
  token: (id, seed) => new TokenModel(id, seed),
  latent: (id, seed) => new LatentModel(id, seed),
};

/** Resolve one model spec "name" or "name#seed". */
export function resolveModel(spec: string): StandInModel {
  const m = /^([a-z]+)(?:#(\d+))?$/.exec(spec.trim());
  if (!m || !(m[1] in BUILDERS)) {
    throw new ModelLoadFailure(
      `cannot load model '${spec}'; known stand-ins: ${Object.keys(BUILDERS).sort().join(", ")}`,
    );
  }
  const seed = m[2] === undefined ? 0n : BigInt(m[2]);
  const id = `${m[1]}#${seed}`;
  return BUILDERS[m[1]](id, seed);
}
