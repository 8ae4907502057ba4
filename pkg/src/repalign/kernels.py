"""Mutual nearest-neighbor kernel alignment.

The score compares two kernels on the pairs (i, j) where j is
simultaneously among the k nearest neighbors of i in both spaces. Both
kernels are restricted to that shared mask, double-centered, and combined
under the Frobenius inner product; the result is normalized by each
kernel's own-neighborhood self-alignment (the centered kernel restricted
to its own top-k mask). Identical kernels therefore score exactly 1,
while independent ones land near 0 because their shared mask carries only
a small fraction of either neighborhood's mass. Self pairs never count as
neighbors, so every mask diagonal is zero.

Heavy loops live in _kernels_numba when that backend is active, otherwise
in the vectorized numpy twin. Each backend fixes its reduction orders, so
results are run-to-run deterministic on one machine; the two backends may
disagree by a few ulps (different accumulation order) while both stay
within the reference-path tolerance.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DegenerateMask, KTooLarge, NonFiniteValue, ShapeMismatch, SingleSample
from .features import FeatureSet

if backend.HAVE_NUMBA:
    from . import _kernels_numba as _impl
else:
    from . import _kernels_numpy as _impl

DEGENERATE_EPS = 1e-12
_SYMMETRY_TOL = 1e-6

# fault hook for exercising the mismatch path of the self-check command;
# never set outside tests
_PERTURB_ENV = "REPALIGN_TEST_PERTURB_CENTERING"


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric n x n similarity matrix in float64."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ShapeMismatch(f"kernel must be square, got {v.shape}")
        if not np.isfinite(v).all():
            raise NonFiniteValue("kernel contains NaN or Inf")
        gap = np.abs(v - v.T)
        bound = _SYMMETRY_TOL * np.maximum(1.0, np.abs(v))
        if (gap > bound).any():
            raise ShapeMismatch("kernel is not symmetric within tolerance")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class KnnSets:
    """Per-row neighbor indices, k per row in rank order, self excluded."""

    indices: np.ndarray

    def __post_init__(self) -> None:
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        if idx.ndim != 2:
            raise ShapeMismatch(f"neighbor table must be 2-D, got {idx.shape}")
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return int(self.indices.shape[1])


@dataclass(frozen=True)
class MutualKnnMask:
    """Row-wise 0/1 mask; entry (i, j) means j neighbors i in both spaces."""

    values: np.ndarray

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.values, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeMismatch(f"mask must be square, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "values", m)

    @property
    def density(self) -> float:
        n = self.values.shape[0]
        off = n * n - n
        return float(self.values.sum() / off) if off else 0.0


@dataclass(frozen=True)
class CknnaScore:
    """Final alignment value plus the quantities a report row needs."""

    value: float
    k: int
    n_effective: int
    mask_density: float


def gram(fs: FeatureSet) -> KernelMatrix:
    """Linear kernel of a feature set, symmetrized by averaging with its
    transpose so accumulation order cannot leave a lopsided matrix."""
    return KernelMatrix(_impl.gram(np.ascontiguousarray(fs.data, dtype=np.float64)))


def knn_sets(kernel: KernelMatrix, k: int) -> KnnSets:
    """Top-k neighbors per row by kernel similarity, self excluded, ties to
    the smaller index.

    Raises:
        KTooLarge: unless 1 <= k <= n - 1.
    """
    n = kernel.n
    if not 1 <= k <= n - 1:
        raise KTooLarge(f"k={k} out of range for n={n}")
    return KnnSets(_impl.topk_indices(kernel.values, k))


def mutual_mask(a: KnnSets, b: KnnSets) -> MutualKnnMask:
    """Indicator of pairs that are neighbors in both spaces."""
    if a.indices.shape != b.indices.shape:
        raise ShapeMismatch("neighbor tables disagree on shape")
    return MutualKnnMask(_impl.mutual_mask(a.indices, b.indices))


def center(m: np.ndarray) -> np.ndarray:
    """Double centering via the three-mean identity: subtract row means and
    column means, add back the grand mean. Equals the two-sided product with
    the usual centering projector without ever materializing it."""
    m = np.ascontiguousarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"centering expects a square matrix, got {m.shape}")
    return _impl.center(m)


def cknna(ka: KernelMatrix, kb: KernelMatrix, k: int = 10) -> CknnaScore:
    """Mutual-kNN-masked centered kernel alignment between two kernels.

    Args:
        ka: kernel of the first representation.
        kb: kernel of the second representation over the same samples.
        k: neighborhood size, 1 <= k <= n - 1.

    Returns:
        CknnaScore. Identical kernels score 1; unrelated kernels land near
        0 because the shared mask then carries only a sliver of either
        neighborhood's mass.

    Raises:
        ShapeMismatch: if sample counts differ.
        SingleSample: if n < 2.
        KTooLarge: if k is out of range.
        DegenerateMask: if either centered masked kernel vanishes (shared or
            own-neighborhood); the score is undefined there and is never
            reported as 0.
    """
    if ka.n != kb.n:
        raise ShapeMismatch(f"kernels disagree on n: {ka.n} vs {kb.n}")
    if ka.n < 2:
        raise SingleSample("alignment needs n >= 2")
    sets_a = knn_sets(ka, k)
    sets_b = knn_sets(kb, k)
    mask = mutual_mask(sets_a, sets_b)
    ca = _impl.center(ka.values * mask.values)
    cb = _impl.center(kb.values * mask.values)
    if os.environ.get(_PERTURB_ENV):
        ca = ca * (1.0 + float(os.environ[_PERTURB_ENV]))
    inner, sq_a, sq_b = _impl.frobenius_stats(ca, cb)
    if math.sqrt(sq_a) < DEGENERATE_EPS or math.sqrt(sq_b) < DEGENERATE_EPS:
        raise DegenerateMask(
            f"centered masked kernel vanished "
            f"(norms {math.sqrt(sq_a):.3e}, {math.sqrt(sq_b):.3e}); "
            f"mutual neighborhoods are too sparse at k={k}"
        )
    own_a = mutual_mask(sets_a, sets_a)
    own_b = mutual_mask(sets_b, sets_b)
    norm_a = math.sqrt(_impl.frobenius_sq(_impl.center(ka.values * own_a.values)))
    norm_b = math.sqrt(_impl.frobenius_sq(_impl.center(kb.values * own_b.values)))
    if norm_a < DEGENERATE_EPS or norm_b < DEGENERATE_EPS:
        raise DegenerateMask(
            f"own-neighborhood kernel vanished after centering "
            f"(norms {norm_a:.3e}, {norm_b:.3e})"
        )
    value = inner / (norm_a * norm_b)
    return CknnaScore(value=float(value), k=k, n_effective=ka.n, mask_density=mask.density)


def cknna_features(fa: FeatureSet, fb: FeatureSet, k: int = 10) -> CknnaScore:
    """Convenience wrapper: Gram both sets, then score them."""
    if fa.n != fb.n:
        raise ShapeMismatch(f"sets disagree on n: {fa.n} vs {fb.n}")
    return cknna(gram(fa), gram(fb), k)
