"""Numba @njit implementations of the dense alignment kernels.

Hot path for the O(n^2 d) Gram products and O(n^2 k) neighbor selection.
All reductions run in a fixed left-to-right order so results are
run-to-run deterministic; no fastmath, no parallel reductions.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def gram(x):
    n, d = x.shape
    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            s = 0.0
            for c in range(d):
                s += x[i, c] * x[j, c]
            out[i, j] = s
            out[j, i] = s
    return out


@njit(cache=True, nogil=True)
def topk_indices(k_mat, k):
    # repeated strict-max scans: first occurrence wins, so ties resolve
    # toward the smaller index exactly like a stable descending sort
    n = k_mat.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        taken = np.zeros(n, dtype=np.bool_)
        taken[i] = True
        for m in range(k):
            best = -1
            best_val = -np.inf
            for j in range(n):
                if not taken[j] and k_mat[i, j] > best_val:
                    best_val = k_mat[i, j]
                    best = j
            out[i, m] = best
            taken[best] = True
    return out


@njit(cache=True, nogil=True)
def mutual_mask(nbr_a, nbr_b):
    n = nbr_a.shape[0]
    k = nbr_a.shape[1]
    out = np.zeros((n, n), dtype=np.float64)
    mark = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        for m in range(k):
            mark[nbr_a[i, m]] = True
        for m in range(k):
            j = nbr_b[i, m]
            if mark[j]:
                out[i, j] = 1.0
        for m in range(k):
            mark[nbr_a[i, m]] = False
    return out


@njit(cache=True, nogil=True)
def center(m):
    n = m.shape[0]
    row = np.empty(n, dtype=np.float64)
    col = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += m[i, j]
        row[i] = s / n
    for j in range(n):
        s = 0.0
        for i in range(n):
            s += m[i, j]
        col[j] = s / n
    grand = 0.0
    for i in range(n):
        grand += row[i]
    grand /= n
    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            out[i, j] = m[i, j] - row[i] - col[j] + grand
    return out


@njit(cache=True, nogil=True)
def frobenius_stats(a, b):
    n = a.shape[0]
    inner = 0.0
    norm_a = 0.0
    norm_b = 0.0
    for i in range(n):
        for j in range(n):
            va = a[i, j]
            vb = b[i, j]
            inner += va * vb
            norm_a += va * va
            norm_b += vb * vb
    return inner, norm_a, norm_b


@njit(cache=True, nogil=True)
def frobenius_sq(m):
    n = m.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            v = m[i, j]
            total += v * v
    return total
