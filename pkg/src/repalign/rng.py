"""Counter-based deterministic random streams.

Every random quantity in the toolkit is derived by hashing (seed, counter)
pairs, so any slice of a stream can be regenerated independently of order
and the same field can be rebuilt bit-for-bit by other implementations.
The Gaussian conversion goes through an inverse normal CDF evaluated with
IEEE-754 exactly-rounded operations only (+, -, *, /, sqrt, and a software
log), which keeps the values reproducible across languages and backends;
libm never enters the stream.
"""

from __future__ import annotations

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U53_SCALE = 2.0 ** -53

_LN2 = 0.6931471805599453
_SQRT_HALF = 0.7071067811865476
# atanh series for log of the reduced mantissa, highest power first
_LOG_COEFFS = (
    1.0 / 27, 1.0 / 25, 1.0 / 23, 1.0 / 21, 1.0 / 19, 1.0 / 17, 1.0 / 15,
    1.0 / 13, 1.0 / 11, 1.0 / 9, 1.0 / 7, 1.0 / 5, 1.0 / 3, 1.0,
)

# rational approximation of the inverse normal CDF (double precision),
# split into a central region and two tail regions
_PPND_A = (
    2.5090809287301226727e+3, 3.3430575583588128105e+4, 6.7265770927008700853e+4,
    4.5921953931549871457e+4, 1.3731693765509461125e+4, 1.9715909503065514427e+3,
    1.3314166789178437745e+2, 3.3871328727963666080e+0,
)
_PPND_B = (
    5.2264952788528545610e+3, 2.8729085735721942674e+4, 3.9307895800092710610e+4,
    2.1213794301586595867e+4, 5.3941960214247511077e+3, 6.8718700749205790830e+2,
    4.2313330701600911252e+1, 1.0,
)
_PPND_C = (
    7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
    1.27045825245236838258e+0, 3.64784832476320460504e+0, 5.76949722146069140550e+0,
    4.63033784615654529590e+0, 1.42343711074968357734e+0,
)
_PPND_D = (
    1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
    1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e+0,
    2.05319162663775882187e+0, 1.0,
)
_PPND_E = (
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
    2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e+0,
    5.46378491116411436990e+0, 6.65790464350110377720e+0,
)
_PPND_F = (
    2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
    7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
    5.99832206555887937690e-1, 1.0,
)


def counter_hash(seed: int, counters: np.ndarray | int) -> np.ndarray:
    """Hash (seed, counter) pairs to uint64 via a splitmix-style finalizer."""
    c = np.asarray(counters, dtype=np.uint64)
    # modular 64-bit wrap-around is intended here
    with np.errstate(over="ignore"):
        z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (c + np.uint64(1)) * np.uint64(_GOLDEN)) & _MASK64
        z ^= z >> np.uint64(30)
        z = (z * np.uint64(_MIX1)) & _MASK64
        z ^= z >> np.uint64(27)
        z = (z * np.uint64(_MIX2)) & _MASK64
        z ^= z >> np.uint64(31)
    return z


def uniform01(hashes: np.ndarray) -> np.ndarray:
    """Map uint64 hashes to doubles strictly inside (0, 1).

    The low bit of the 53-bit mantissa is forced to 1, so the scaling is
    exact and the endpoints are unreachable.
    """
    h53 = (np.asarray(hashes, dtype=np.uint64) >> np.uint64(11)) | np.uint64(1)
    return h53.astype(np.float64) * _U53_SCALE


def _dlog(x: np.ndarray) -> np.ndarray:
    """Deterministic natural log built from exactly-rounded float64 ops."""
    m, e = np.frexp(np.asarray(x, dtype=np.float64))
    low = m < _SQRT_HALF
    m = np.where(low, m * 2.0, m)
    e = np.where(low, e - 1, e).astype(np.float64)
    t = (m - 1.0) / (m + 1.0)
    s = t * t
    p = np.full_like(s, _LOG_COEFFS[0])
    for c in _LOG_COEFFS[1:]:
        p = p * s + c
    return 2.0 * t * p + e * _LN2


def _horner(coeffs: tuple[float, ...], r: np.ndarray) -> np.ndarray:
    p = np.full_like(r, coeffs[0])
    for c in coeffs[1:]:
        p = p * r + c
    return p


def norm_ppf(p: np.ndarray) -> np.ndarray:
    """Inverse normal CDF on (0, 1), deterministic across platforms.

    Accurate to ~1e-15 relative; the arithmetic uses only exactly-rounded
    IEEE-754 double operations so independent implementations that follow
    the same evaluation order produce identical bits.
    """
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    # central region
    rc = 0.180625 - q * q
    central = q * _horner(_PPND_A, rc) / _horner(_PPND_B, rc)
    # tail regions share r = sqrt(-log(min(p, 1-p)))
    rt = np.where(q < 0.0, p, 1.0 - p)
    rt = np.where(rt <= 0.0, np.finfo(np.float64).tiny, rt)  # guard; inputs never hit 0
    rt = np.sqrt(-_dlog(rt))
    near = rt - 1.6
    far = rt - 5.0
    tail_near = _horner(_PPND_C, near) / _horner(_PPND_D, near)
    tail_far = _horner(_PPND_E, far) / _horner(_PPND_F, far)
    tail = np.where(rt <= 5.0, tail_near, tail_far)
    tail = np.where(q < 0.0, -tail, tail)
    return np.where(np.abs(q) <= 0.425, central, tail)


def standard_normals(seed: int, counters: np.ndarray) -> np.ndarray:
    """i.i.d. standard normal draws addressed by (seed, counter)."""
    return norm_ppf(uniform01(counter_hash(seed, counters)))


def normal_field(seed: int, shape: tuple[int, ...], offset: int = 0) -> np.ndarray:
    """Standard-normal array whose flat index is the stream counter."""
    count = int(np.prod(shape)) if shape else 1
    counters = np.arange(offset, offset + count, dtype=np.uint64)
    return standard_normals(seed, counters).reshape(shape)


def uniform_field(seed: int, shape: tuple[int, ...], offset: int = 0) -> np.ndarray:
    """Uniform(0, 1) array whose flat index is the stream counter."""
    count = int(np.prod(shape)) if shape else 1
    counters = np.arange(offset, offset + count, dtype=np.uint64)
    return uniform01(counter_hash(seed, counters)).reshape(shape)


def derive_seed(seed: int, *labels: int) -> int:
    """Derive an independent substream seed from integer labels."""
    out = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    for lab in labels:
        out = counter_hash(int(out), np.uint64(lab & 0xFFFFFFFFFFFFFFFF))
    return int(out)
