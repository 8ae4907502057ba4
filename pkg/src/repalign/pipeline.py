"""Composition of the preprocessing and scoring stages.

Order is fixed: pool token-level sets, jointly filter outliers, normalize
channels, build Gram matrices, score. Filtering precedes normalization so
extreme rows cannot distort the per-channel moments they are judged by.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import ValidationError
from .features import (
    FeatureSet,
    OutlierPolicy,
    TokenFeatureSet,
    filter_outliers,
    normalize_channels,
    pool_tokens,
)
from .kernels import CknnaScore, cknna, gram

AGGREGATORS = ("mean", "median", "min")


@dataclass(frozen=True)
class Settings:
    """Run-wide metric settings shared by every command."""

    k: int = 10
    normalize: bool = True
    outlier: OutlierPolicy = field(default_factory=OutlierPolicy)
    aggregator: str = "mean"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValidationError(f"k must be at least 1, got {self.k}")
        if self.aggregator not in AGGREGATORS:
            raise ValidationError(f"unknown aggregator {self.aggregator!r}")

    def preprocessing_record(self) -> dict[str, Any]:
        """Settings block embedded in every report, making runs self-describing."""
        return {
            "normalize": bool(self.normalize),
            "outlier": self.outlier.to_dict(),
            "pool": "mean",
        }


def ensure_pooled(fs: FeatureSet | TokenFeatureSet) -> FeatureSet:
    """Pool token-level sets; pass pooled sets through untouched."""
    if isinstance(fs, TokenFeatureSet):
        return pool_tokens(fs)
    return fs


def preprocess_pair(
    fa: FeatureSet | TokenFeatureSet,
    fb: FeatureSet | TokenFeatureSet,
    settings: Settings,
) -> tuple[FeatureSet, FeatureSet, list[int]]:
    """Pool, jointly filter, and normalize one pair of feature sets."""
    a = ensure_pooled(fa)
    b = ensure_pooled(fb)
    a, b, kept = filter_outliers(a, b, settings.outlier)
    if settings.normalize:
        a = normalize_channels(a)
        b = normalize_channels(b)
    return a, b, kept


def score_pair(
    fa: FeatureSet | TokenFeatureSet,
    fb: FeatureSet | TokenFeatureSet,
    settings: Settings,
) -> CknnaScore:
    """Full pipeline for one pair: preprocess, Gram, align."""
    a, b, _ = preprocess_pair(fa, fb, settings)
    return cknna(gram(a), gram(b), settings.k)
