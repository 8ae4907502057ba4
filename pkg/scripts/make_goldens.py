#!/usr/bin/env python3
"""Regenerate the committed fixtures under tests/fixtures.

Every expected value in expected.json and null_distribution.json is
computed by the pure-Python reference implementation, never by the fast
path the tests exercise. Golden report files are produced through the
command-line interface so the byte-identity tests compare against real
tool output. Rerunning this script reproduces the committed files byte
for byte.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import numpy as np

from repalign.cli import main as cli_main
from repalign.features import FeatureMeta, FeatureSet
from repalign.oracle import cknna_oracle
from repalign.pipeline import Settings, preprocess_pair, score_pair
from repalign.rafs import load_features, write_rafs
from repalign.report import canonical_json
from repalign.rng import derive_seed, normal_field
from repalign.transforms import TransformCondition

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

PAIR_SEED = 7
PAIR_SHAPE = (40, 10)
PAIR_NOISE = 0.25
SE_SEED = 3
SE_N = 32
SE_D = 16
SE_SIZE = 32
PROFILE_SEED = 42
PROFILE_SHAPE = (48, 12)
PROFILE_LAYERS = 4
NULL_RUNS = 20
NULL_SHAPE = (256, 64)
NULL_SEED_BASE = 5000
NULL_BOUND = 0.15
ORACLE_TOL = 1e-10


def _feature_set(data: np.ndarray, model_id: str) -> FeatureSet:
    return FeatureSet(data.astype(np.float32), FeatureMeta(model_id=model_id))


def _run_cli(argv: list[str]) -> None:
    code = cli_main(argv)
    if code != 0:
        raise SystemExit(f"cli {argv[0]} exited with {code}")


def _pair_values(path_a: Path, path_b: Path, settings: Settings) -> tuple[float, float]:
    """Full-precision fast and reference scores for one file pair."""
    fa = load_features(path_a)
    fb = load_features(path_b)
    fast = score_pair(fa, fb, settings).value
    pa, pb, _ = preprocess_pair(fa, fb, settings)
    return fast, cknna_oracle(pa.data, pb.data, settings.k).value


def _check(label: str, got: float, want: float) -> None:
    delta = abs(got - want)
    if delta > ORACLE_TOL:
        raise SystemExit(f"{label}: fast path {got!r} vs reference {want!r} (delta {delta:.3e})")
    print(f"  {label}: reference {want:+.12f} delta {delta:.3e}")


def make_pair(expected: dict) -> None:
    print("pair fixture")
    base = normal_field(PAIR_SEED, PAIR_SHAPE)
    drift = normal_field(derive_seed(PAIR_SEED, 1), PAIR_SHAPE)
    alpha = FIXTURES / "alpha.rafs"
    beta = FIXTURES / "beta.rafs"
    write_rafs(alpha, _feature_set(base, "fixture-a"))
    write_rafs(beta, _feature_set(base + PAIR_NOISE * drift, "fixture-b"))
    golden = FIXTURES / "golden_cknna.json"
    _run_cli(["cknna", str(alpha), str(beta), "--out", str(golden)])
    settings = Settings()
    fast, want = _pair_values(alpha, beta, settings)
    _check("cknna", fast, want)
    expected["cknna_pair"] = {"value": want, "k": settings.k}


def make_se(expected: dict) -> None:
    print("se fixture")
    se_dir = FIXTURES / "se"
    _run_cli(
        [
            "synth",
            "--outdir",
            str(se_dir),
            "--n",
            str(SE_N),
            "--d",
            str(SE_D),
            "--size",
            str(SE_SIZE),
            "--seed",
            str(SE_SEED),
        ]
    )
    manifest = se_dir / "manifest.json"
    golden = FIXTURES / "golden_se_cknna.json"
    _run_cli(["se-cknna", str(manifest), "--out", str(golden)])
    _run_cli(["se-cknna", str(manifest), "--format", "csv", "--out", str(FIXTURES / "golden_se_cknna.csv")])
    settings = Settings()
    report = json.loads(golden.read_bytes())
    rows = json.loads(manifest.read_bytes())["conditions"]
    conditions = []
    for row in rows:
        label = TransformCondition.from_dict(row["condition"]).label()
        fast, want = _pair_values(se_dir / row["a"], se_dir / row["b"], settings)
        _check(label, fast, want)
        conditions.append({"label": label, "value": want})
    expected["se_conditions"] = conditions
    expected["se_aggregate_fields"] = {
        "aggregate": report["results"]["aggregate"],
        "baseline": report["results"]["baseline"],
        "relative_change": report["results"]["relative_change"],
    }


def make_profile(expected: dict) -> None:
    print("profile fixture")
    prof_dir = FIXTURES / "profile"
    prof_dir.mkdir(parents=True, exist_ok=True)
    ref = normal_field(PROFILE_SEED, PROFILE_SHAPE)
    write_rafs(prof_dir / "ref.rafs", _feature_set(ref, "fixture-ref"))
    rows = []
    for level in range(1, PROFILE_LAYERS + 1):
        drift = normal_field(derive_seed(PROFILE_SEED, level), PROFILE_SHAPE)
        layer = ref + drift * 2.0 ** (-level)
        name = f"layer{level}.rafs"
        write_rafs(prof_dir / name, _feature_set(layer, f"fixture-layer-{level}"))
        rows.append({"path": name, "layer_index": level})
    manifest = prof_dir / "manifest.json"
    manifest.write_bytes(
        canonical_json(
            {
                "kind": "layer_profile_manifest",
                "reference": "ref.rafs",
                "reference_level": 0.5,
                "layers": rows,
            }
        )
    )
    golden = FIXTURES / "golden_layer_profile.json"
    _run_cli(["layer-profile", str(manifest), "--out", str(golden)])
    _run_cli(
        ["layer-profile", str(manifest), "--format", "csv", "--out", str(FIXTURES / "golden_layer_profile.csv")]
    )
    settings = Settings()
    layers = []
    for row in rows:
        fast, want = _pair_values(prof_dir / row["path"], prof_dir / "ref.rafs", settings)
        _check(f"layer {row['layer_index']}", fast, want)
        layers.append({"layer_index": row["layer_index"], "value": want})
    expected["profile_layers"] = layers


def make_null() -> None:
    print("null distribution (reference implementation, 20 runs)")
    values = []
    for run in range(NULL_RUNS):
        xa = normal_field(derive_seed(NULL_SEED_BASE + run, 1), NULL_SHAPE)
        xb = normal_field(derive_seed(NULL_SEED_BASE + run, 2), NULL_SHAPE)
        score = cknna_oracle(xa, xb, 10)
        if abs(score.value) >= NULL_BOUND:
            raise SystemExit(f"null run {run}: |{score.value}| >= {NULL_BOUND}")
        print(f"  run {run:2d}: {score.value:+.12f}")
        values.append(score.value)
    payload = {
        "n": NULL_SHAPE[0],
        "d": NULL_SHAPE[1],
        "k": 10,
        "seed_base": NULL_SEED_BASE,
        "bound": NULL_BOUND,
        "values": values,
    }
    (FIXTURES / "null_distribution.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )


def main() -> int:
    if FIXTURES.exists():
        shutil.rmtree(FIXTURES)
    FIXTURES.mkdir(parents=True)
    expected: dict = {"tolerance": ORACLE_TOL}
    make_pair(expected)
    make_se(expected)
    make_profile(expected)
    make_null()
    (FIXTURES / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    print(f"fixtures written under {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
