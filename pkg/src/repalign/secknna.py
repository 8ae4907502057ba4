"""Alignment under semantic-preserving transforms.

For every condition both representations are evaluated on the same
transformed inputs; the per-condition scores are aggregated into one
robustness number and compared against the untransformed baseline. A
representation pair whose alignment is an artifact of fragile surface
structure shows a large negative relative change; a pair aligned on
content barely moves.

Conditions whose parameters make the transform a bit-exact identity
(scale 1.0, rotation 0) are scored and reported but stay out of the
aggregate, which would otherwise be diluted by trivial copies of the
baseline.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backend import worker_count
from .errors import (
    ConditionSetMismatch,
    DegenerateMask,
    MissingIdentityCondition,
    ValidationError,
    ZeroBaseline,
)
from .features import FeatureSet, TokenFeatureSet
from .kernels import CknnaScore
from .pipeline import Settings, score_pair
from .transforms import TransformCondition, canonical_order

FeatureMap = dict[TransformCondition, FeatureSet | TokenFeatureSet]


@dataclass(frozen=True)
class SeCknnaResult:
    """Per-condition scores plus the aggregate robustness statistics.

    per_condition follows canonical suite order; a None score marks a
    condition whose mask degenerated (flagged in warnings, excluded from
    the aggregate).
    """

    per_condition: tuple[tuple[TransformCondition, CknnaScore | None], ...]
    aggregate: float
    baseline: float
    relative_change: float
    aggregator: str
    warnings: tuple[str, ...]


def relative_change(se: float, base: float) -> float:
    """Signed fractional change of the aggregate against the baseline.

    Raises:
        ZeroBaseline: if base is exactly zero.
    """
    if base == 0.0:
        raise ZeroBaseline("relative change is undefined for a zero baseline")
    return (se - base) / base


def _aggregate(values: list[float], how: str) -> float:
    if all(v == values[0] for v in values):
        return values[0]
    if how == "mean":
        return statistics.fmean(values)
    if how == "median":
        return float(statistics.median(values))
    return min(values)


def _baseline_condition(conds: list[TransformCondition]) -> TransformCondition:
    for cond in conds:
        if cond.family == "identity":
            return cond
    for cond in conds:
        if cond.is_identity_equivalent:
            return cond
    raise MissingIdentityCondition("condition set has no identity condition for the baseline")


def se_cknna(
    features_a: FeatureMap,
    features_b: FeatureMap,
    settings: Settings | None = None,
) -> SeCknnaResult:
    """Score every condition and aggregate into the robustness statistic.

    Args:
        features_a: condition -> features of representation A on inputs
            transformed under that condition.
        features_b: same condition set for representation B.
        settings: metric settings; defaults to Settings().

    Returns:
        SeCknnaResult in canonical condition order.

    Raises:
        ConditionSetMismatch: if the two maps cover different conditions.
        MissingIdentityCondition: if no identity condition exists.
        DegenerateMask: if the baseline condition itself degenerates, or
            every aggregate member does.
    """
    settings = settings if settings is not None else Settings()
    if set(features_a) != set(features_b):
        only_a = sorted(c.label() for c in set(features_a) - set(features_b))
        only_b = sorted(c.label() for c in set(features_b) - set(features_a))
        raise ConditionSetMismatch(f"condition sets differ (A only: {only_a}, B only: {only_b})")
    conds = canonical_order(list(features_a))
    base_cond = _baseline_condition(conds)
    if all(c.is_identity_equivalent for c in conds):
        raise ValidationError("suite has no non-identity conditions to aggregate")

    def one(cond: TransformCondition) -> CknnaScore | DegenerateMask:
        try:
            return score_pair(features_a[cond], features_b[cond], settings)
        except DegenerateMask as exc:
            return exc

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        outcomes = list(pool.map(one, conds))

    per_condition: list[tuple[TransformCondition, CknnaScore | None]] = []
    warnings: list[str] = []
    members: list[float] = []
    baseline: float | None = None
    for cond, outcome in zip(conds, outcomes):
        if isinstance(outcome, DegenerateMask):
            if cond == base_cond:
                raise DegenerateMask(f"baseline condition {cond.label()}: {outcome}")
            per_condition.append((cond, None))
            warnings.append(f"condition {cond.label()}: degenerate mask, excluded from aggregate")
            continue
        per_condition.append((cond, outcome))
        if outcome.value < 0.0:
            warnings.append(f"condition {cond.label()}: negative score {outcome.value:.6g}")
        if cond == base_cond:
            baseline = outcome.value
        if not cond.is_identity_equivalent:
            members.append(outcome.value)
    assert baseline is not None
    if not members:
        raise DegenerateMask("every aggregate member degenerated; nothing to aggregate")
    aggregate = _aggregate(members, settings.aggregator)
    return SeCknnaResult(
        per_condition=tuple(per_condition),
        aggregate=aggregate,
        baseline=baseline,
        relative_change=relative_change(aggregate, baseline),
        aggregator=settings.aggregator,
        warnings=tuple(warnings),
    )
