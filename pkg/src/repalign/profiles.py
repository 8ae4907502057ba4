"""Layer-wise alignment profiles against a fixed reference representation.

Each layer's features are scored against the same reference with the same
settings; entries keep the input order. A layer whose mask degenerates is
kept in the profile with an empty score and a warning instead of aborting
the sweep, since one pathological layer should not void the other entries.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backend import worker_count
from .errors import DegenerateMask, EmptyLayerList, ValidationError
from .features import FeatureSet, TokenFeatureSet
from .kernels import CknnaScore
from .pipeline import Settings, score_pair


@dataclass(frozen=True)
class LayerProfile:
    """Ordered per-layer scores with peak and mean over the valid entries.

    entries holds (layer_index, score-or-None); peak is (layer_index, value)
    over non-degenerate entries, ties to the earliest layer.
    """

    entries: tuple[tuple[int, CknnaScore | None], ...]
    peak: tuple[int, float]
    mean_score: float
    reference_level: float | None
    warnings: tuple[str, ...]

    def __post_init__(self) -> None:
        indices = [idx for idx, _ in self.entries]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValidationError(f"layer indices must strictly increase, got {indices}")


def layer_profile(
    layer_features: list[FeatureSet | TokenFeatureSet],
    reference: FeatureSet | TokenFeatureSet,
    settings: Settings | None = None,
    layer_indices: list[int] | None = None,
    reference_level: float | None = None,
) -> LayerProfile:
    """Score every layer against the reference.

    Args:
        layer_features: ordered layer feature sets, paired row-for-row with
            the reference.
        reference: the fixed reference representation.
        settings: metric settings; defaults to Settings().
        layer_indices: explicit indices for the entries; defaults to the
            distinct layer_id values carried by the feature metadata, or to
            positions 0..L-1 when those are not distinct. Must strictly
            increase.
        reference_level: optional annotation copied into the profile; never
            computed here.

    Raises:
        EmptyLayerList: no layers given.
        ValidationError: index list malformed.
        DegenerateMask: every single layer degenerated.
    """
    settings = settings if settings is not None else Settings()
    if not layer_features:
        raise EmptyLayerList("layer profile needs at least one layer")
    if layer_indices is None:
        from_meta = [int(fs.meta.layer_id) for fs in layer_features]
        if len(set(from_meta)) == len(from_meta) and sorted(from_meta) == from_meta:
            layer_indices = from_meta
        else:
            layer_indices = list(range(len(layer_features)))
    if len(layer_indices) != len(layer_features):
        raise ValidationError(
            f"{len(layer_indices)} indices for {len(layer_features)} layers"
        )

    def one(fs: FeatureSet | TokenFeatureSet) -> CknnaScore | DegenerateMask:
        try:
            return score_pair(fs, reference, settings)
        except DegenerateMask as exc:
            return exc

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        outcomes = list(pool.map(one, layer_features))

    entries: list[tuple[int, CknnaScore | None]] = []
    warnings: list[str] = []
    valid: list[tuple[int, float]] = []
    for idx, outcome in zip(layer_indices, outcomes):
        if isinstance(outcome, DegenerateMask):
            entries.append((idx, None))
            warnings.append(f"layer {idx}: degenerate mask, excluded from peak and mean")
            continue
        entries.append((idx, outcome))
        if outcome.value < 0.0:
            warnings.append(f"layer {idx}: negative score {outcome.value:.6g}")
        valid.append((idx, outcome.value))
    if not valid:
        raise DegenerateMask("every layer degenerated; profile is empty of scores")
    peak = max(valid, key=lambda pair: (pair[1], -pair[0]))
    mean_score = sum(v for _, v in valid) / len(valid)
    return LayerProfile(
        entries=tuple(entries),
        peak=peak,
        mean_score=mean_score,
        reference_level=reference_level,
        warnings=tuple(warnings),
    )
