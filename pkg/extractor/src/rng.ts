/** Counter-based deterministic random streams.
 *
 * Every random quantity is derived by hashing (seed, counter) pairs, so any
 * slice of a stream can be regenerated independently of order. The Gaussian
 * conversion goes through an inverse normal CDF built from exactly-rounded
 * IEEE-754 double operations only (+, -, *, /, sqrt, and a software log), so
 * the streams are reproducible bit-for-bit across languages: given the same
 * seed, this module and its numpy counterpart emit identical doubles.
 */

export const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

const U53_SCALE = 2 ** -53;

const LN2 = 0.6931471805599453;
const SQRT_HALF = 0.7071067811865476;
// atanh series for log of the reduced mantissa, highest power first
const LOG_COEFFS = [
  1 / 27, 1 / 25, 1 / 23, 1 / 21, 1 / 19, 1 / 17, 1 / 15,
  1 / 13, 1 / 11, 1 / 9, 1 / 7, 1 / 5, 1 / 3, 1.0,
];

// rational approximation of the inverse normal CDF (double precision),
// split into a central region and two tail regions
const PPND_A = [
  2.5090809287301226727e3, 3.3430575583588128105e4, 6.7265770927008700853e4,
  4.5921953931549871457e4, 1.3731693765509461125e4, 1.9715909503065514427e3,
  1.3314166789178437745e2, 3.3871328727963666080e0,
];
const PPND_B = [
  5.2264952788528545610e3, 2.8729085735721942674e4, 3.9307895800092710610e4,
  2.1213794301586595867e4, 5.3941960214247511077e3, 6.8718700749205790830e2,
  4.2313330701600911252e1, 1.0,
];
const PPND_C = [
  7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
  1.27045825245236838258e0, 3.64784832476320460504e0, 5.76949722146069140550e0,
  4.63033784615654529590e0, 1.42343711074968357734e0,
];
const PPND_D = [
  1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
  1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e0,
  2.05319162663775882187e0, 1.0,
];
const PPND_E = [
  2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
  2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e0,
  5.46378491116411436990e0, 6.65790464350110377720e0,
];
const PPND_F = [
  2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
  7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
  5.99832206555887937690e-1, 1.0,
];

// smallest normal double; tail guard only, inputs never reach it
const TINY = 2.2250738585072014e-308;

/** Hash one (seed, counter) pair to a uint64 via a splitmix-style finalizer. */
export function counterHash(seed: bigint, counter: bigint): bigint {
  let z = (seed & MASK64) + ((((counter & MASK64) + 1n) & MASK64) * GOLDEN & MASK64) & MASK64;
  z ^= z >> 30n;
  z = (z * MIX1) & MASK64;
  z ^= z >> 27n;
  z = (z * MIX2) & MASK64;
  z ^= z >> 31n;
  return z;
}

/** Map a uint64 hash to a double strictly inside (0, 1).
 *
 * The low bit of the 53-bit mantissa is forced to 1, so the scaling is exact
 * and the endpoints are unreachable.
 */
export function uniform01(hash: bigint): number {
  const h53 = (hash >> 11n) | 1n;
  return Number(h53) * U53_SCALE;
}

const FREXP_VIEW = new DataView(new ArrayBuffer(8));

/** Split a positive finite double into mantissa in [0.5, 1) and exponent. */
function frexp(x: number): [number, number] {
  let shift = 0;
  if (x < 2.2250738585072014e-308) {
    // subnormals lack the implicit leading bit; scale into the normal
    // range first (exact: multiplying by a power of two never rounds)
    x *= 2 ** 64;
    shift = 64;
  }
  FREXP_VIEW.setFloat64(0, x);
  const hi = FREXP_VIEW.getUint32(0);
  const e = ((hi >>> 20) & 0x7ff) - 1022 - shift;
  FREXP_VIEW.setUint32(0, (hi & 0x800fffff) | (1022 << 20));
  return [FREXP_VIEW.getFloat64(0), e];
}

/** Deterministic natural log built from exactly-rounded float64 ops. */
export function dlog(x: number): number {
  let [m, e] = frexp(x);
  if (m < SQRT_HALF) {
    m = m * 2.0;
    e = e - 1;
  }
  const t = (m - 1.0) / (m + 1.0);
  const s = t * t;
  let p = LOG_COEFFS[0];
  for (let i = 1; i < LOG_COEFFS.length; i++) {
    p = p * s + LOG_COEFFS[i];
  }
  return 2.0 * t * p + e * LN2;
}

function horner(coeffs: readonly number[], r: number): number {
  let p = coeffs[0];
  for (let i = 1; i < coeffs.length; i++) {
    p = p * r + coeffs[i];
  }
  return p;
}

/** Inverse normal CDF on (0, 1), deterministic across platforms.
 *
 * Accurate to ~1e-15 relative; the arithmetic uses only exactly-rounded
 * IEEE-754 double operations in a fixed order, matching the reference
 * implementation bit-for-bit.
 */
export function normPpf(p: number): number {
  const q = p - 0.5;
  if (Math.abs(q) <= 0.425) {
    const r = 0.180625 - q * q;
    return q * horner(PPND_A, r) / horner(PPND_B, r);
  }
  let r = q < 0.0 ? p : 1.0 - p;
  if (r <= 0.0) {
    r = TINY;
  }
  r = Math.sqrt(-dlog(r));
  let v: number;
  if (r <= 5.0) {
    v = horner(PPND_C, r - 1.6) / horner(PPND_D, r - 1.6);
  } else {
    v = horner(PPND_E, r - 5.0) / horner(PPND_F, r - 5.0);
  }
  return q < 0.0 ? -v : v;
}

/** One standard normal draw addressed by (seed, counter). */
export function standardNormal(seed: bigint, counter: bigint): number {
  return normPpf(uniform01(counterHash(seed, counter)));
}

/** Standard-normal array whose flat index is the stream counter. */
export function normalField(seed: bigint, count: number, offset = 0n): Float64Array {
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = standardNormal(seed, offset + BigInt(i));
  }
  return out;
}

/** Uniform(0, 1) array whose flat index is the stream counter. */
export function uniformField(seed: bigint, count: number, offset = 0n): Float64Array {
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = uniform01(counterHash(seed, offset + BigInt(i)));
  }
  return out;
}

/** Derive an independent substream seed from integer labels. */
export function deriveSeed(seed: bigint, ...labels: bigint[]): bigint {
  let out = seed & MASK64;
  for (const lab of labels) {
    out = counterHash(out, lab & MASK64);
  }
  return out;
}
