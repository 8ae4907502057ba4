/** Linear-interpolant latent noising.
 *
 * A latent z at noise level t becomes (1 - t) * z + t * eps with seeded
 * standard-normal eps, so the clean and fully-noised endpoints are exact:
 * t = 0 returns z itself and t = 1 returns pure seeded noise. The noise is
 * addressed by (seed, layer, sample, component), independent of processing
 * order and of which other samples survived decoding.
 */

import { ValidationError } from "./errors.js";
import { MASK64, deriveSeed, normalField } from "./rng.js";

export interface LatentNoising {
  /** noise level in [0, 1] */
  t: number;
  /** clean-signal weight, always 1 - t */
  alphaT: number;
  /** noise weight, always t */
  sigmaT: number;
  noiseSeed: bigint;
  conditioning: "null_label";
}

export function makeLatentNoising(t: number, noiseSeed: bigint): LatentNoising {
  if (!(t >= 0 && t <= 1)) {
    throw new ValidationError(`noise level t must lie in [0, 1], got ${t}`);
  }
  if (noiseSeed < 0n || noiseSeed > MASK64) {
    throw new ValidationError("noise seed must fit in an unsigned 64-bit integer");
  }
  return { t, alphaT: 1 - t, sigmaT: t, noiseSeed, conditioning: "null_label" };
}

/** Parse the job's diffusion_noising block. alpha_t and sigma_t may be given
 * explicitly but must then equal 1 - t and t. */
export function latentNoisingFromJson(obj: unknown, parseSeed: (raw: unknown) => bigint): LatentNoising {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ValidationError("diffusion_noising must be a JSON object");
  }
  const rec = obj as Record<string, unknown>;
  const t = rec.t === undefined ? 0.5 : Number(rec.t);
  const spec = makeLatentNoising(t, rec.noise_seed === undefined ? 0n : parseSeed(rec.noise_seed));
  if (rec.alpha_t !== undefined && Number(rec.alpha_t) !== spec.alphaT) {
    throw new ValidationError(`alpha_t must equal 1 - t = ${spec.alphaT}`);
  }
  if (rec.sigma_t !== undefined && Number(rec.sigma_t) !== spec.sigmaT) {
    throw new ValidationError(`sigma_t must equal t = ${spec.sigmaT}`);
  }
  if (rec.conditioning !== undefined && rec.conditioning !== "null_label") {
    throw new ValidationError(`unknown conditioning ${JSON.stringify(rec.conditioning)}`);
  }
  return spec;
}

/** Noise one latent vector. Labels address the substream (layer, sample). */
export function noiseLatent(z: Float64Array, spec: LatentNoising, ...labels: bigint[]): Float64Array {
  if (spec.t === 0) {
    return z.slice();
  }
  const eps = normalField(deriveSeed(spec.noiseSeed, ...labels), z.length);
  if (spec.t === 1) {
    return eps;
  }
  const out = new Float64Array(z.length);
  for (let i = 0; i < z.length; i++) {
    out[i] = spec.alphaT * z[i] + spec.sigmaT * eps[i];
  }
  return out;
}
