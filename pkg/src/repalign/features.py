"""Feature matrices, their provenance metadata, and preprocessing.

A FeatureSet is an n x d float32 matrix plus metadata; row i of every set in
a comparison must refer to the same underlying sample i. Preprocessing runs
joint outlier filtering first and channel normalization second, so outliers
cannot corrupt the per-channel moments.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import (
    AllFiltered,
    NonFiniteValue,
    OnlyClsToken,
    ShapeMismatch,
    SingleSample,
    ValidationError,
)
from .transforms import TransformCondition

NORMALIZE_EPS = 1e-8
_MAD_EPS = 1e-12


@dataclass(frozen=True)
class FeatureMeta:
    """Provenance carried with a feature matrix into every report row."""

    model_id: str = "unknown"
    layer_id: int = 0
    condition: TransformCondition | None = None
    pooled: bool = True
    source_image_count: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "model_id": self.model_id,
            "layer_id": int(self.layer_id),
            "condition": self.condition.to_dict() if self.condition else None,
            "pooled": bool(self.pooled),
            "source_image_count": int(self.source_image_count),
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "FeatureMeta":
        cond = obj.get("condition")
        return cls(
            model_id=str(obj.get("model_id", "unknown")),
            layer_id=int(obj.get("layer_id", 0)),
            condition=TransformCondition.from_dict(cond) if cond else None,
            pooled=bool(obj.get("pooled", True)),
            source_image_count=int(obj.get("source_image_count", 0)),
        )


def _validate_payload(data: np.ndarray) -> np.ndarray:
    data = np.ascontiguousarray(data, dtype=np.float32)
    if not np.isfinite(data).all():
        raise NonFiniteValue("feature payload contains NaN or Inf")
    data.flags.writeable = False
    return data


@dataclass(frozen=True)
class FeatureSet:
    """Pooled n x d float32 feature matrix. Immutable after construction."""

    data: np.ndarray
    meta: FeatureMeta = field(default_factory=FeatureMeta)

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValidationError(f"feature matrix must be 2-D, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValidationError("feature matrix needs n >= 1 and d >= 1")
        object.__setattr__(self, "data", _validate_payload(data))

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    @property
    def d(self) -> int:
        return int(self.data.shape[1])


@dataclass(frozen=True)
class TokenFeatureSet:
    """Token-level n x t x d float32 features; token 0 is CLS when flagged."""

    data: np.ndarray
    cls_present: bool = False
    meta: FeatureMeta = field(default_factory=lambda: FeatureMeta(pooled=False))

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValidationError(f"token features must be 3-D, got shape {data.shape}")
        if min(data.shape) < 1:
            raise ValidationError("token features need n, t, d >= 1")
        object.__setattr__(self, "data", _validate_payload(data))

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    @property
    def t(self) -> int:
        return int(self.data.shape[1])

    @property
    def d(self) -> int:
        return int(self.data.shape[2])


@dataclass(frozen=True)
class OutlierPolicy:
    """How joint sample filtering decides which rows to drop."""

    method: str = "norm_mad"
    mad_multiplier: float = 5.0

    def __post_init__(self) -> None:
        if self.method not in ("none", "norm_mad"):
            raise ValidationError(f"unknown outlier method {self.method!r}")
        if self.mad_multiplier <= 0.0:
            raise ValidationError("mad_multiplier must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {"method": self.method, "mad_multiplier": float(self.mad_multiplier)}


def normalize_channels(fs: FeatureSet) -> FeatureSet:
    """Z-score every channel across samples (population convention).

    Constant channels map to zero via an epsilon guard instead of erroring,
    so degenerate synthetic inputs stay usable. Idempotent up to float32
    rounding.

    Raises:
        SingleSample: if the set has fewer than two samples.
    """
    if fs.n < 2:
        raise SingleSample("channel normalization needs n >= 2")
    x = fs.data.astype(np.float64)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    out = np.where(std > NORMALIZE_EPS, (x - mean) / np.where(std > NORMALIZE_EPS, std, 1.0), 0.0)
    return FeatureSet(out.astype(np.float32), fs.meta)


def _keep_by_norm(data: np.ndarray, multiplier: float) -> np.ndarray:
    norms = np.linalg.norm(data.astype(np.float64), axis=1)
    med = float(np.median(norms))
    mad = float(np.median(np.abs(norms - med)))
    threshold = multiplier * mad + _MAD_EPS * max(1.0, abs(med))
    return np.abs(norms - med) <= threshold


def filter_outliers(
    fa: FeatureSet, fb: FeatureSet, policy: OutlierPolicy
) -> tuple[FeatureSet, FeatureSet, list[int]]:
    """Jointly drop rows whose feature norm is an outlier in either set.

    A row survives only if its L2 norm stays within mad_multiplier * MAD of
    the median norm in both sets; surviving indices are returned ascending
    and pairing is preserved.

    Raises:
        ShapeMismatch: if the sets disagree on n.
        AllFiltered: if no sample survives.
    """
    if fa.n != fb.n:
        raise ShapeMismatch(f"paired sets disagree on n: {fa.n} vs {fb.n}")
    if policy.method == "none":
        return fa, fb, list(range(fa.n))
    keep = _keep_by_norm(fa.data, policy.mad_multiplier) & _keep_by_norm(fb.data, policy.mad_multiplier)
    kept = [int(i) for i in np.flatnonzero(keep)]
    if not kept:
        raise AllFiltered("outlier filtering removed every sample")
    if len(kept) == fa.n:
        return fa, fb, kept
    idx = np.asarray(kept, dtype=np.int64)
    out_a = FeatureSet(fa.data[idx], fa.meta)
    out_b = FeatureSet(fb.data[idx], fb.meta)
    return out_a, out_b, kept


def pool_tokens(tokens: TokenFeatureSet) -> FeatureSet:
    """Mean over spatial tokens, class token excluded.

    Raises:
        OnlyClsToken: if the class token is the only token.
    """
    data = tokens.data
    if tokens.cls_present:
        if tokens.t < 2:
            raise OnlyClsToken("token set has a class token and no spatial tokens")
        data = data[:, 1:, :]
    pooled = data.astype(np.float64).mean(axis=1).astype(np.float32)
    meta = replace(tokens.meta, pooled=True)
    return FeatureSet(pooled, meta)
