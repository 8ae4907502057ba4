"""Semantic-preserving image transformations and the default condition suite.

Each condition applies exactly one transform to a clean image:

* noise   -- clamp(x + sigma * eps, 0, 1), eps drawn from the counter PRNG
             keyed by the condition seed, pixel order row-major with the
             channel innermost;
* scale   -- bilinear resize to (round(s*H), round(s*W)) and back, using the
             half-pixel center convention;
* rotation -- exact index permutation for multiples of 90 degrees;
* identity -- bit-exact pass-through.

Identity parameters (sigma=0, s=1.0, theta=0) are bit-exact identities for
their families. The noise field depends only on (seed, pixel index), so a
second implementation can rebuild it from the serialized condition alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ScaleTooSmall, ValidationError
from .rng import derive_seed, normal_field

FAMILIES = ("identity", "noise", "scale", "rotation")

NOISE_SIGMAS = (0.05, 0.1, 0.15, 0.2)
SCALE_FACTORS = (0.25, 0.5, 0.75, 1.0)
ROTATION_DEGREES = (0.0, 90.0, 180.0, 270.0)


@dataclass(frozen=True)
class TransformCondition:
    """One perturbation: a family, its parameter, and a deterministic seed."""

    family: str
    parameter: float
    seed: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown transform family {self.family!r}")
        if self.family == "rotation" and float(self.parameter) % 90.0 != 0.0:
            raise ValidationError("rotation angle must be a multiple of 90 degrees")
        if self.family == "noise" and self.parameter < 0.0:
            raise ValidationError("noise sigma must be non-negative")
        if self.family == "scale" and self.parameter <= 0.0:
            raise ValidationError("scale factor must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")

    @property
    def is_identity_equivalent(self) -> bool:
        """True when the transform is a bit-exact identity."""
        if self.family == "identity":
            return True
        if self.family == "noise":
            return self.parameter == 0.0
        if self.family == "scale":
            return self.parameter == 1.0
        return float(self.parameter) % 360.0 == 0.0

    def label(self) -> str:
        if self.family == "identity":
            return "identity"
        return f"{self.family}_{self.parameter:g}"

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, "parameter": float(self.parameter), "seed": int(self.seed)}

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "TransformCondition":
        try:
            return cls(str(obj["family"]), float(obj["parameter"]), int(obj["seed"]))
        except KeyError as exc:
            raise ValidationError(f"condition object missing key {exc}") from exc


def default_suite(base_seed: int = 0) -> list[TransformCondition]:
    """Canonical 13-condition suite: identity plus four members per family.

    Seeds derive from base_seed by position so two runs with the same base
    seed perturb identically.
    """
    conds = [TransformCondition("identity", 0.0, base_seed)]
    idx = 1
    for sigma in NOISE_SIGMAS:
        conds.append(TransformCondition("noise", sigma, (base_seed + idx) % 2**64))
        idx += 1
    for s in SCALE_FACTORS:
        conds.append(TransformCondition("scale", s, (base_seed + idx) % 2**64))
        idx += 1
    for theta in ROTATION_DEGREES:
        conds.append(TransformCondition("rotation", theta, (base_seed + idx) % 2**64))
        idx += 1
    return conds


def canonical_order(conds: list[TransformCondition]) -> list[TransformCondition]:
    """Stable report order: identity, noise, scale, rotation; parameter ascending."""
    return sorted(conds, key=lambda c: (FAMILIES.index(c.family), c.parameter, c.seed))


def suite_to_json(conds: list[TransformCondition]) -> list[dict[str, Any]]:
    return [c.to_dict() for c in conds]


def suite_from_json(items: list[dict[str, Any]]) -> list[TransformCondition]:
    return [TransformCondition.from_dict(item) for item in items]


@dataclass(frozen=True)
class Image:
    """H x W x 3 pixel array with all values finite in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        # takes ownership of the array: it is frozen in place when no cast copy is needed
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValidationError(f"image must be HxWx3, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValidationError("image must have positive height and width")
        if not np.isfinite(px).all():
            raise ValidationError("image contains non-finite pixels")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValidationError("image pixels must lie in [0, 1]")
        if not px.flags.owndata or px.base is not None:
            px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _resize_bilinear(px: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Half-pixel-center bilinear resample, edge-clamped.

    Arithmetic is fixed-order float64 so independent implementations can
    reproduce it exactly.
    """
    in_h, in_w = px.shape[0], px.shape[1]
    if out_h == in_h and out_w == in_w:
        return px.copy()
    ratio_y = in_h / out_h
    ratio_x = in_w / out_w
    sy = (np.arange(out_h, dtype=np.float64) + 0.5) * ratio_y - 0.5
    sx = (np.arange(out_w, dtype=np.float64) + 0.5) * ratio_x - 0.5
    sy = np.minimum(np.maximum(sy, 0.0), in_h - 1.0)
    sx = np.minimum(np.maximum(sx, 0.0), in_w - 1.0)
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (sy - y0)[:, None, None]
    fx = (sx - x0)[None, :, None]
    p00 = px[y0][:, x0]
    p01 = px[y0][:, x1]
    p10 = px[y1][:, x0]
    p11 = px[y1][:, x1]
    top = (1.0 - fx) * p00 + fx * p01
    bot = (1.0 - fx) * p10 + fx * p11
    return (1.0 - fy) * top + fy * bot


def transform_image(img: Image, cond: TransformCondition) -> Image:
    """Apply one condition to an image. Identity parameters are bit-exact."""
    px = img.pixels
    if cond.family == "identity":
        return img
    if cond.family == "noise":
        sigma = float(cond.parameter)
        if sigma == 0.0:
            return img
        eps = normal_field(cond.seed, px.shape)
        return Image(np.clip(px + sigma * eps, 0.0, 1.0))
    if cond.family == "scale":
        s = float(cond.parameter)
        if s == 1.0:
            return img
        h, w = img.height, img.width
        hs = _round_half_up(s * h)
        ws = _round_half_up(s * w)
        if hs < 1 or ws < 1:
            raise ScaleTooSmall(f"scale {s} collapses a {h}x{w} image below one pixel")
        small = _resize_bilinear(px, hs, ws)
        back = _resize_bilinear(small, h, w)
        return Image(np.clip(back, 0.0, 1.0))
    # rotation: multiples of 90 degrees only, counterclockwise
    quarter = int(float(cond.parameter) / 90.0) % 4
    if quarter == 0:
        return img
    return Image(np.ascontiguousarray(np.rot90(px, quarter, axes=(0, 1))))


def condition_for_index(cond: TransformCondition, index: int) -> TransformCondition:
    """Per-image condition within a corpus: noise draws a fresh field for
    every image by deriving the image's seed from the condition seed, while
    the seed-free families pass through unchanged."""
    if cond.family == "noise" and cond.parameter != 0.0:
        return TransformCondition(cond.family, cond.parameter, derive_seed(cond.seed, index))
    return cond


def transform_corpus(images: list[Image], cond: TransformCondition) -> list[Image]:
    """Apply one condition across a whole corpus, image i under
    condition_for_index(cond, i)."""
    return [transform_image(img, condition_for_index(cond, i)) for i, img in enumerate(images)]
