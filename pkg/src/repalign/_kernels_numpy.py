"""Pure-numpy implementations of the dense alignment kernels.

Fallback path when numba is unavailable or disabled; semantics match
`_kernels_numba` (identical neighbor selection and tie-breaking, float64
arithmetic throughout), though accumulation order differs, so values may
drift from the numba path by a few ulps.
"""

from __future__ import annotations

import numpy as np


def gram(x: np.ndarray) -> np.ndarray:
    """Pairwise inner products of rows; symmetry enforced by averaging."""
    k = x @ x.T
    return (k + k.T) * 0.5


def topk_indices(k_mat: np.ndarray, k: int) -> np.ndarray:
    """Per-row indices of the k largest off-diagonal entries.

    Ties break toward the smaller index (stable sort on descending value).
    """
    work = np.array(k_mat, dtype=np.float64, copy=True)
    np.fill_diagonal(work, -np.inf)
    order = np.argsort(-work, axis=1, kind="stable")
    return np.ascontiguousarray(order[:, :k].astype(np.int64))


def mutual_mask(nbr_a: np.ndarray, nbr_b: np.ndarray) -> np.ndarray:
    """Binary mask: 1 where j is a k-nearest neighbor of i in both sets."""
    n = nbr_a.shape[0]
    rows = np.arange(n)[:, None]
    in_a = np.zeros((n, n), dtype=bool)
    in_b = np.zeros((n, n), dtype=bool)
    in_a[rows, nbr_a] = True
    in_b[rows, nbr_b] = True
    return (in_a & in_b).astype(np.float64)


def center(m: np.ndarray) -> np.ndarray:
    """Double centering via the three-mean identity (no explicit H)."""
    row = m.mean(axis=1)
    col = m.mean(axis=0)
    grand = row.mean()
    return m - row[:, None] - col[None, :] + grand


def frobenius_stats(a: np.ndarray, b: np.ndarray) -> tuple[float, float, float]:
    """(<A,B>_F, ||A||_F^2, ||B||_F^2)."""
    return float(np.sum(a * b)), float(np.sum(a * a)), float(np.sum(b * b))


def frobenius_sq(m: np.ndarray) -> float:
    """||M||_F^2."""
    return float(np.sum(m * m))
