"""Deterministic stand-in image corpus and feature extractors.

These let the whole metric stack run end to end without any trained model:
seeded smooth images go through the transform suite, a fixed random
projection turns them into feature vectors, and every step is a pure
function of its seeds.

Two extractor modes exist. "generic" summarizes an image by an 8x8 grid of
per-cell channel means, so it reacts to any spatial change. The
"rotation_invariant" mode summarizes each channel by sorted order
statistics; quarter-turn rotations permute pixels within a channel and
leave the sorted values bit-identical, so its features are exactly
rotation invariant.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .features import FeatureMeta, FeatureSet
from .rng import derive_seed, normal_field, uniform_field
from .transforms import Image, TransformCondition, _resize_bilinear

GRID = 8
STATS_PER_CHANNEL = 64
PROJECTION_INPUT = GRID * GRID * 3

MODES = ("generic", "rotation_invariant")

# substream labels for seed derivation
_LBL_BASE = 1
_LBL_DETAIL = 2
_LBL_PROJECTION = 3
_LBL_MODEL_A = 4
_LBL_MODEL_B = 5

_BASE_GRID = 2
_DETAIL_GRID = 8
_DETAIL_WEIGHT = 0.1


def model_seeds(base_seed: int) -> tuple[int, int]:
    """Two independent stand-in model identities derived from one base seed."""
    return derive_seed(base_seed, _LBL_MODEL_A), derive_seed(base_seed, _LBL_MODEL_B)


def synth_image(seed: int, index: int, size: int = 32) -> Image:
    """Smooth random image: a coarse random field plus mild fine detail.

    The coarse grid is deliberately tiny, so the corpus varies along few
    directions and any reasonable projection of it sees the same structure;
    the detail term keeps individual images distinct. Bilinear upsampling
    keeps the image smooth enough that mild rescaling preserves most of its
    structure.
    """
    if size < GRID:
        raise ValidationError(f"image size must be at least {GRID}, got {size}")
    base = uniform_field(derive_seed(seed, _LBL_BASE, index), (_BASE_GRID, _BASE_GRID, 3))
    detail = uniform_field(derive_seed(seed, _LBL_DETAIL, index), (_DETAIL_GRID, _DETAIL_GRID, 3))
    coarse = _resize_bilinear(base, size, size)
    fine = _resize_bilinear(detail, size, size)
    px = coarse + _DETAIL_WEIGHT * (fine - 0.5)
    return Image(np.clip(px, 0.0, 1.0))


def synth_corpus(seed: int, count: int, size: int = 32) -> list[Image]:
    """Corpus of seeded images; image i depends only on (seed, i, size)."""
    if count < 1:
        raise ValidationError("corpus needs at least one image")
    return [synth_image(seed, i, size) for i in range(count)]


def _grid_means(px: np.ndarray) -> np.ndarray:
    h, w = px.shape[0], px.shape[1]
    if h < GRID or w < GRID:
        raise ValidationError(f"generic mode needs at least {GRID}x{GRID} pixels, got {h}x{w}")
    ys = [(g * h) // GRID for g in range(GRID + 1)]
    xs = [(g * w) // GRID for g in range(GRID + 1)]
    out = np.empty((GRID, GRID, 3), dtype=np.float64)
    for gy in range(GRID):
        for gx in range(GRID):
            block = px[ys[gy] : ys[gy + 1], xs[gx] : xs[gx + 1], :]
            out[gy, gx, :] = block.reshape(-1, 3).mean(axis=0)
    return out.reshape(-1)


def _channel_order_stats(px: np.ndarray) -> np.ndarray:
    count = px.shape[0] * px.shape[1]
    out = np.empty(STATS_PER_CHANNEL * 3, dtype=np.float64)
    positions = [(i * (count - 1)) // (STATS_PER_CHANNEL - 1) for i in range(STATS_PER_CHANNEL)]
    for c in range(3):
        ranked = np.sort(px[:, :, c], axis=None)
        out[c * STATS_PER_CHANNEL : (c + 1) * STATS_PER_CHANNEL] = ranked[positions]
    return out


def projection_matrix(model_seed: int, d: int) -> np.ndarray:
    """Fixed seeded d x 192 projection, scaled to keep outputs order one."""
    if d < 1:
        raise ValidationError("feature dimension must be at least 1")
    mat = normal_field(derive_seed(model_seed, _LBL_PROJECTION), (d, PROJECTION_INPUT))
    return mat / np.sqrt(float(PROJECTION_INPUT))


def toy_extract(img: Image, model_seed: int, d: int, mode: str = "generic") -> np.ndarray:
    """Feature vector of length d for one image.

    Args:
        img: input image, at least 8x8 pixels for generic mode.
        model_seed: selects the fixed projection; acts as the model identity.
        d: output dimension.
        mode: "generic" (grid of cell means) or "rotation_invariant"
            (per-channel sorted order statistics).

    Returns:
        float64 vector of length d in (-1, 1).
    """
    if mode not in MODES:
        raise ValidationError(f"unknown extractor mode {mode!r}")
    if mode == "generic":
        summary = _grid_means(img.pixels)
    else:
        summary = _channel_order_stats(img.pixels)
    return np.tanh(projection_matrix(model_seed, d) @ summary)


def extract_corpus(
    images: list[Image],
    model_seed: int,
    d: int,
    mode: str = "generic",
    model_id: str | None = None,
    condition: TransformCondition | None = None,
) -> FeatureSet:
    """Stack per-image features into a FeatureSet with provenance filled in."""
    if not images:
        raise ValidationError("need at least one image")
    proj = projection_matrix(model_seed, d)
    rows = np.empty((len(images), d), dtype=np.float64)
    for i, img in enumerate(images):
        if mode == "generic":
            summary = _grid_means(img.pixels)
        elif mode == "rotation_invariant":
            summary = _channel_order_stats(img.pixels)
        else:
            raise ValidationError(f"unknown extractor mode {mode!r}")
        rows[i] = np.tanh(proj @ summary)
    meta = FeatureMeta(
        model_id=model_id if model_id is not None else f"toy-{mode}",
        layer_id=0,
        condition=condition,
        pooled=True,
        source_image_count=len(images),
    )
    return FeatureSet(rows.astype(np.float32), meta)
