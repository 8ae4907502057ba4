#!/usr/bin/env python3
"""Regenerate the cross-language parity fixtures under extractor/fixtures/.

Run from the repository root with the alignment package installed:

    python3 extractor/scripts/make_fixtures.py

Everything the TypeScript tests compare against bit-for-bit comes from here:
RNG outputs, transform pixels, number formatting, canonical JSON bytes, and
two feature files. u64 values are stored as decimal strings because JSON
numbers cannot carry them exactly; doubles that must match to the bit are
stored both as floats and as 16-hex-digit little-endian-free bit patterns.
"""

from __future__ import annotations

import json
import struct
import sys
from pathlib import Path

import numpy as np

from repalign.features import FeatureMeta, FeatureSet, TokenFeatureSet
from repalign.rafs import write_rafs
from repalign.report import canonical_json, format_float
from repalign.rng import (
    counter_hash,
    derive_seed,
    norm_ppf,
    normal_field,
    uniform01,
)
from repalign.transforms import (
    Image,
    TransformCondition,
    condition_for_index,
    default_suite,
    suite_to_json,
    transform_image,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def bits(v: float) -> str:
    """Bit pattern of a double as 16 hex digits (sign/exponent/mantissa order)."""
    return f"{struct.unpack('<Q', struct.pack('<d', float(v)))[0]:016x}"


def hash_cases() -> list[dict]:
    pairs = [
        (0, 0),
        (0, 1),
        (1, 0),
        (42, 7),
        (0xDEADBEEF, 123456789),
        (2**64 - 1, 0),
        (2**64 - 1, 2**64 - 1),
        (0x123456789ABCDEF0, 2**63),
    ]
    out = []
    for seed, counter in pairs:
        h = int(counter_hash(seed, np.array([counter], dtype=np.uint64))[0])
        out.append({"seed": str(seed), "counter": str(counter), "hash": str(h)})
    return out


def uniform_cases() -> list[dict]:
    out = []
    for seed in (0, 1, 42, 2**64 - 1):
        hashes = counter_hash(seed, np.arange(4, dtype=np.uint64))
        for counter, u in zip(range(4), uniform01(hashes)):
            out.append({"seed": str(seed), "counter": str(counter), "bits": bits(u)})
    return out


def ppf_cases() -> list[dict]:
    # central region, both near-tail sides, far tails, and the region edges
    ps = [
        0.5, 0.3, 0.7, 0.075, 0.925,  # central (|p - 0.5| <= 0.425)
        0.074, 0.01, 0.99, 1e-6, 1.0 - 1e-6,  # near tail
        1e-12, 1.0 - 1e-12, 5e-324,  # far tail and the smallest subnormal
        0.0749999999, 0.9250000001,
    ]
    arr = norm_ppf(np.array(ps, dtype=np.float64))
    return [{"p": bits(p), "x": bits(x)} for p, x in zip(ps, arr)]


def normal_field_cases() -> list[dict]:
    out = []
    for seed, count, offset in ((0, 8, 0), (42, 8, 0), (42, 4, 100), (2**64 - 1, 6, 3)):
        vals = normal_field(seed, (count,), offset=offset)
        out.append(
            {
                "seed": str(seed),
                "count": count,
                "offset": str(offset),
                "bits": [bits(v) for v in vals],
            }
        )
    return out


def derive_cases() -> list[dict]:
    cases = [
        (0, ()),
        (0, (0,)),
        (42, (3, 0)),
        (42, (3, 1)),
        (12345, (1, 2, 3)),
        (2**64 - 1, (2**64 - 1,)),
    ]
    return [
        {"seed": str(seed), "labels": [str(l) for l in labels], "derived": str(derive_seed(seed, *labels))}
        for seed, labels in cases
    ]


def condition_cases() -> dict:
    suite = default_suite(7)
    labels = [c.label() for c in suite]
    per_index = []
    noise = TransformCondition("noise", 0.1, 99)
    for idx in (0, 1, 5):
        derived = condition_for_index(noise, idx)
        per_index.append({"index": idx, "seed": str(derived.seed)})
    ident = condition_for_index(TransformCondition("identity", 0.0, 99), 4)
    return {
        "suite_json": suite_to_json(suite),
        "labels": labels,
        "noise_seed_by_index": per_index,
        "identity_seed_unchanged": str(ident.seed),
    }


def image_grid(h: int, w: int) -> Image:
    """Deterministic smooth test image with distinct channel ramps."""
    y = np.linspace(0.0, 1.0, h)[:, None, None]
    x = np.linspace(0.0, 1.0, w)[None, :, None]
    c = np.array([0.25, 0.5, 0.75])[None, None, :]
    px = (y * 0.4 + x * 0.35 + c * 0.25).clip(0.0, 1.0)
    return Image(px)


def transform_cases() -> list[dict]:
    img = image_grid(4, 5)
    conds = [
        TransformCondition("identity", 0.0, 0),
        TransformCondition("noise", 0.1, 42),
        TransformCondition("noise", 0.0, 42),
        TransformCondition("scale", 0.5, 0),
        TransformCondition("scale", 0.75, 0),
        TransformCondition("scale", 1.6, 0),
        TransformCondition("rotation", 90.0, 0),
        TransformCondition("rotation", 180.0, 0),
        TransformCondition("rotation", 270.0, 0),
        TransformCondition("rotation", 360.0, 0),
    ]
    out = []
    for cond in conds:
        res = transform_image(img, cond)
        out.append(
            {
                "condition": cond.to_dict(),
                "in_shape": [img.height, img.width],
                "out_shape": [res.height, res.width],
                "pixels": [bits(v) for v in res.pixels.ravel()],
            }
        )
    return out


def input_image_case() -> dict:
    img = image_grid(4, 5)
    return {"shape": [4, 5, 3], "bits": [bits(v) for v in img.pixels.ravel()]}


def format_cases() -> dict:
    values = [
        0.0,
        -0.0,
        1.0,
        -1.0,
        0.5,
        0.1,
        1.5,
        2.0 / 3.0,
        1e-5,
        1e-4,
        1.234e-4,
        123456789.0,
        1e15,
        1e16,
        1e21,
        -2.5e-7,
        3.14159265358979,
        0.30000000000000004,
        1234.5678,
        9.999999999e8,
        0.0001,
        0.00001,
        100.0,
        250.0,
        0.25,
        270.0,
        1e100,
        -1e-100,
        5e-324,
        1.7976931348623157e308,
    ]
    rows = []
    for v in values:
        rows.append(
            {
                "bits": bits(v),
                "repr": repr(v),
                "g": f"{v:g}",
                "g9": format_float(v),
            }
        )
    return {"rows": rows}


def json_cases() -> dict:
    cond = TransformCondition("noise", 0.1, 42)
    meta = FeatureMeta(
        model_id="toy-a",
        layer_id=2,
        condition=cond,
        pooled=True,
        source_image_count=16,
    )
    compact = json.dumps(meta.to_dict(), sort_keys=True, separators=(",", ":"))
    sample = {
        "kind": "se_cknna_manifest",
        "conditions": [
            {"condition": cond.to_dict(), "a": "features/a_noise_0.1.rafs", "b": "features/b_noise_0.1.rafs"},
            {
                "condition": TransformCondition("identity", 0.0, 7).to_dict(),
                "a": "features/a_identity.rafs",
                "b": "features/b_identity.rafs",
            },
        ],
    }
    tricky = {
        "empty_list": [],
        "empty_map": {},
        "esc": "a\"b\\c\nd\tü☃",
        "flag": True,
        "nothing": None,
        "numbers": [0.0, -0.0, 1.0, 0.1, 1e16, 1e-5, 123456789.123456789],
        "whole": 42,
    }
    return {
        "compact_meta": compact,
        "canonical_manifest_b64": canonical_json(sample).hex(),
        "canonical_tricky_b64": canonical_json(tricky).hex(),
    }


def write_rafs_samples() -> None:
    cond = TransformCondition("noise", 0.1, 42)
    rng = np.random.default_rng(12345)
    data = rng.standard_normal((6, 4)).astype(np.float32)
    fs = FeatureSet(
        data=data,
        meta=FeatureMeta(
            model_id="toy-a", layer_id=1, condition=cond, pooled=True, source_image_count=6
        ),
    )
    write_rafs(FIXTURES / "sample.rafs", fs)

    tokens = rng.standard_normal((3, 5, 4)).astype(np.float32)
    tfs = TokenFeatureSet(
        data=tokens,
        cls_present=True,
        meta=FeatureMeta(
            model_id="toy-token", layer_id=0, condition=None, pooled=False, source_image_count=3
        ),
    )
    write_rafs(FIXTURES / "token_sample.rafs", tfs)


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    parity = {
        "counter_hash": hash_cases(),
        "uniform01": uniform_cases(),
        "norm_ppf": ppf_cases(),
        "normal_field": normal_field_cases(),
        "derive_seed": derive_cases(),
        "conditions": condition_cases(),
        "input_image": input_image_case(),
        "transforms": transform_cases(),
        "formatting": format_cases(),
        "json": json_cases(),
    }
    (FIXTURES / "parity.json").write_text(json.dumps(parity, indent=1, sort_keys=True) + "\n")
    write_rafs_samples()
    print(f"wrote fixtures under {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
