"""Timing comparison of the numba and numpy kernel backends.

Runs each dense primitive and the composed alignment pipeline on both
implementation modules over a grid of problem sizes, reporting best-of-N
wall times and the worst value disagreement between the two paths.

Usage:
    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --sizes 256 1024 --dim 128 --repeats 5
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from repalign import _kernels_numpy
from repalign.rng import derive_seed, normal_field

try:
    from repalign import _kernels_numba

    HAVE_NUMBA = True
except ImportError:
    _kernels_numba = None
    HAVE_NUMBA = False


def pipeline_value(impl, ka: np.ndarray, kb: np.ndarray, k: int) -> float:
    """The alignment score computed from raw kernels with one backend."""
    sets_a = impl.topk_indices(ka, k)
    sets_b = impl.topk_indices(kb, k)
    mask = impl.mutual_mask(sets_a, sets_b)
    ca = impl.center(ka * mask)
    cb = impl.center(kb * mask)
    inner, _, _ = impl.frobenius_stats(ca, cb)
    norm_a = math.sqrt(impl.frobenius_sq(impl.center(ka * impl.mutual_mask(sets_a, sets_a))))
    norm_b = math.sqrt(impl.frobenius_sq(impl.center(kb * impl.mutual_mask(sets_b, sets_b))))
    return inner / (norm_a * norm_b)


def best_of(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_case(n: int, d: int, k: int, repeats: int) -> list[tuple[str, float, float]]:
    x = normal_field(derive_seed(0, n, d, 1), (n, d))
    y = normal_field(derive_seed(0, n, d, 2), (n, d))
    ka = _kernels_numpy.gram(x)
    kb = _kernels_numpy.gram(y)
    sets = _kernels_numpy.topk_indices(ka, k)
    masked = ka * _kernels_numpy.mutual_mask(sets, _kernels_numpy.topk_indices(kb, k))

    cases = [
        ("gram", lambda impl: impl.gram(x)),
        ("topk_indices", lambda impl: impl.topk_indices(ka, k)),
        ("mutual_mask", lambda impl: impl.mutual_mask(sets, sets)),
        ("center", lambda impl: impl.center(masked)),
        ("frobenius_stats", lambda impl: impl.frobenius_stats(masked, masked)),
        ("pipeline", lambda impl: pipeline_value(impl, ka, kb, k)),
    ]
    rows = []
    for name, fn in cases:
        if HAVE_NUMBA:
            fn(_kernels_numba)  # warm the jit before timing
            t_nb = best_of(lambda: fn(_kernels_numba), repeats)
        else:
            t_nb = math.nan
        t_np = best_of(lambda: fn(_kernels_numpy), repeats)
        rows.append((name, t_nb, t_np))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[128, 256, 512, 1024],
                        help="sample counts to benchmark")
    parser.add_argument("--dim", type=int, default=64, help="feature dimension")
    parser.add_argument("--k", type=int, default=10, help="neighborhood size")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats, best kept")
    args = parser.parse_args()

    if not HAVE_NUMBA:
        print("numba backend unavailable; timing the numpy path only\n")

    header = f"{'primitive':<16} {'n':>5} {'d':>4}  {'numba (ms)':>11} {'numpy (ms)':>11} {'ratio':>6}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        for name, t_nb, t_np in bench_case(n, args.dim, args.k, args.repeats):
            ratio = f"{t_np / t_nb:5.1f}x" if t_nb == t_nb and t_nb > 0 else "   -  "
            nb_text = f"{t_nb * 1e3:11.3f}" if t_nb == t_nb else "          -"
            print(f"{name:<16} {n:>5} {args.dim:>4}  {nb_text} {t_np * 1e3:11.3f} {ratio}")
        print()

    if HAVE_NUMBA:
        worst = 0.0
        for n in args.sizes:
            x = normal_field(derive_seed(1, n, args.dim, 1), (n, args.dim))
            y = normal_field(derive_seed(1, n, args.dim, 2), (n, args.dim))
            ka, kb = _kernels_numpy.gram(x), _kernels_numpy.gram(y)
            got_nb = pipeline_value(_kernels_numba, ka, kb, args.k)
            got_np = pipeline_value(_kernels_numpy, ka, kb, args.k)
            worst = max(worst, abs(got_nb - got_np))
        print(f"worst backend disagreement on the pipeline value: {worst:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
