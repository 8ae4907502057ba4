"""Brute-force reference for the alignment score, in plain Python.

This twin exists so the fast array code has something to disagree with.
It uses no numpy for the math: matrices are lists of lists, products are
explicit scalar loops, and centering multiplies out the literal centering
matrix instead of using the three-mean shortcut. Cubic time, quadratic
memory, so it refuses large inputs.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import DegenerateMask, KTooLarge, ShapeMismatch, SingleSample, ValidationError
from .kernels import CknnaScore

ORACLE_MAX_N = 512


def _as_rows(x) -> list[list[float]]:
    if hasattr(x, "data") and hasattr(x.data, "tolist"):
        x = x.data
    if hasattr(x, "tolist"):
        x = x.tolist()
    return [[float(v) for v in row] for row in x]


def _gram(rows: list[list[float]]) -> list[list[float]]:
    return [[sum(p * q for p, q in zip(ri, rj)) for rj in rows] for ri in rows]


def _knn(kmat: list[list[float]], k: int) -> list[list[int]]:
    n = len(kmat)
    out = []
    for i, row in enumerate(kmat):
        order = sorted((j for j in range(n) if j != i), key=lambda j: (-row[j], j))
        out.append(order[:k])
    return out


def _mutual(nbr_a: list[list[int]], nbr_b: list[list[int]]) -> list[list[float]]:
    n = len(nbr_a)
    mask = [[0.0] * n for _ in range(n)]
    for i in range(n):
        in_a = set(nbr_a[i])
        for j in nbr_b[i]:
            if j in in_a:
                mask[i][j] = 1.0
    return mask


def _mask(kmat: list[list[float]], mask: list[list[float]]) -> list[list[float]]:
    return [[v * w for v, w in zip(kr, mr)] for kr, mr in zip(kmat, mask)]


def _matmul(a: list[list[float]], b: list[list[float]]) -> list[list[float]]:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def _center(m: list[list[float]]) -> list[list[float]]:
    n = len(m)
    inv = 1.0 / n
    h = [[(1.0 if i == j else 0.0) - inv for j in range(n)] for i in range(n)]
    return _matmul(_matmul(h, m), h)


def cknna_oracle(xa: Sequence[Sequence[float]], xb: Sequence[Sequence[float]], k: int) -> CknnaScore:
    """Alignment score computed the slow, obvious way.

    Args:
        xa: first feature matrix (FeatureSet, array, or nested lists).
        xb: second feature matrix with the same row count.
        k: neighborhood size.

    Returns:
        CknnaScore matching the fast path's fields.

    Raises:
        ValidationError: if n exceeds ORACLE_MAX_N.
        DegenerateMask: same degeneracy rule as the fast path.
    """
    ra = _as_rows(xa)
    rb = _as_rows(xb)
    n = len(ra)
    if n != len(rb):
        raise ShapeMismatch(f"row counts differ: {n} vs {len(rb)}")
    if n < 2:
        raise SingleSample("need n >= 2")
    if n > ORACLE_MAX_N:
        raise ValidationError(f"reference path refuses n={n} > {ORACLE_MAX_N}")
    if not 1 <= k <= n - 1:
        raise KTooLarge(f"k={k} out of range for n={n}")
    ka = _gram(ra)
    kb = _gram(rb)
    nbr_a = _knn(ka, k)
    nbr_b = _knn(kb, k)
    mask = _mutual(nbr_a, nbr_b)
    ca = _center(_mask(ka, mask))
    cb = _center(_mask(kb, mask))
    inner = sum(sum(x * y for x, y in zip(r1, r2)) for r1, r2 in zip(ca, cb))
    shared_a = math.sqrt(sum(sum(x * x for x in r) for r in ca))
    shared_b = math.sqrt(sum(sum(x * x for x in r) for r in cb))
    if shared_a < 1e-12 or shared_b < 1e-12:
        raise DegenerateMask(
            f"centered masked kernel vanished (norms {shared_a:.3e}, {shared_b:.3e})"
        )
    da = _center(_mask(ka, _mutual(nbr_a, nbr_a)))
    db = _center(_mask(kb, _mutual(nbr_b, nbr_b)))
    norm_a = math.sqrt(sum(sum(x * x for x in r) for r in da))
    norm_b = math.sqrt(sum(sum(x * x for x in r) for r in db))
    if norm_a < 1e-12 or norm_b < 1e-12:
        raise DegenerateMask(
            f"own-neighborhood kernel vanished after centering "
            f"(norms {norm_a:.3e}, {norm_b:.3e})"
        )
    ones = sum(sum(row) for row in mask)
    return CknnaScore(
        value=inner / (norm_a * norm_b),
        k=k,
        n_effective=n,
        mask_density=ones / (n * n - n),
    )
