"""Layer sweeps against a fixed reference."""

from __future__ import annotations

import json

import numpy as np
import pytest
from conftest import DISJOINT_A, DISJOINT_B, RAW_SETTINGS, correlated_pair, rand_features

from repalign import (
    DegenerateMask,
    EmptyLayerList,
    FeatureMeta,
    FeatureSet,
    OutlierPolicy,
    Settings,
    ValidationError,
    layer_profile,
    load_features,
    score_pair,
)
from repalign.rng import derive_seed, normal_field


class TestLayerProfile:
    def test_reference_layer_scores_one(self):
        fs = rand_features(100, 48, 12)
        profile = layer_profile([fs], fs)
        idx, score = profile.entries[0]
        assert score is not None
        assert score.value == pytest.approx(1.0, abs=1e-6)
        assert profile.peak == (idx, score.value)
        assert profile.mean_score == score.value

    def test_rotated_layer_scores_equal(self):
        # channel z-scoring is basis-dependent, so rotation equivalence is
        # checked on the raw kernel path
        settings = Settings(normalize=False, outlier=OutlierPolicy("none"))
        fs, ref = correlated_pair(101, 48, 12)
        raw = normal_field(derive_seed(101, 9), (12, 12))
        q, _ = np.linalg.qr(raw)
        rotated = FeatureSet(fs.data.astype(np.float64) @ q)
        profile = layer_profile([fs, rotated], ref, settings)
        a = profile.entries[0][1]
        b = profile.entries[1][1]
        assert a is not None and b is not None
        assert b.value == pytest.approx(a.value, abs=1e-6)

    def test_reordering_layers_swaps_values(self):
        la = rand_features(103, 48, 12)
        lb = rand_features(104, 48, 12)
        ref = rand_features(105, 48, 12)
        fwd = layer_profile([la, lb], ref)
        rev = layer_profile([lb, la], ref)
        assert fwd.entries[0][1].value == rev.entries[1][1].value
        assert fwd.entries[1][1].value == rev.entries[0][1].value

    def test_degenerate_layer_kept_as_gap(self):
        ref = FeatureSet(DISJOINT_B)
        layers = [FeatureSet(DISJOINT_A), FeatureSet(DISJOINT_B)]
        profile = layer_profile(layers, ref, RAW_SETTINGS)
        assert profile.entries[0][1] is None
        assert profile.entries[1][1] is not None
        assert profile.peak[0] == 1
        assert profile.mean_score == profile.entries[1][1].value
        assert any("layer 0" in w for w in profile.warnings)

    def test_all_layers_degenerate(self):
        ref = FeatureSet(DISJOINT_B)
        with pytest.raises(DegenerateMask):
            layer_profile([FeatureSet(DISJOINT_A)], ref, RAW_SETTINGS)

    def test_empty_layer_list(self):
        ref = rand_features(106, 32, 8)
        with pytest.raises(EmptyLayerList):
            layer_profile([], ref)

    def test_peak_tie_prefers_earlier_layer(self):
        fs = rand_features(107, 48, 12)
        profile = layer_profile([fs, fs], fs)
        assert profile.entries[0][1].value == profile.entries[1][1].value
        assert profile.peak[0] == 0

    def test_reference_level_annotation(self):
        fs = rand_features(108, 32, 8)
        profile = layer_profile([fs], fs, reference_level=0.5)
        assert profile.reference_level == 0.5


class TestLayerIndices:
    def test_metadata_indices_used_when_ascending(self):
        ref = rand_features(110, 48, 12)
        layers = [
            FeatureSet(rand_features(111, 48, 12).data, FeatureMeta(layer_id=3)),
            FeatureSet(rand_features(112, 48, 12).data, FeatureMeta(layer_id=7)),
        ]
        profile = layer_profile(layers, ref)
        assert [idx for idx, _ in profile.entries] == [3, 7]

    def test_positional_fallback_for_non_ascending_metadata(self):
        ref = rand_features(110, 48, 12)
        layers = [
            FeatureSet(rand_features(111, 48, 12).data, FeatureMeta(layer_id=7)),
            FeatureSet(rand_features(112, 48, 12).data, FeatureMeta(layer_id=3)),
        ]
        profile = layer_profile(layers, ref)
        assert [idx for idx, _ in profile.entries] == [0, 1]

    def test_positional_fallback_for_duplicate_metadata(self):
        ref = rand_features(110, 48, 12)
        layers = [
            FeatureSet(rand_features(111, 48, 12).data, FeatureMeta(layer_id=2)),
            FeatureSet(rand_features(112, 48, 12).data, FeatureMeta(layer_id=2)),
        ]
        profile = layer_profile(layers, ref)
        assert [idx for idx, _ in profile.entries] == [0, 1]

    def test_explicit_indices_length_mismatch(self):
        ref = rand_features(110, 32, 8)
        with pytest.raises(ValidationError):
            layer_profile([ref], ref, layer_indices=[0, 1])

    def test_explicit_indices_must_increase(self):
        ref = rand_features(110, 32, 8)
        la = rand_features(111, 32, 8)
        with pytest.raises(ValidationError):
            layer_profile([ref, la], ref, layer_indices=[2, 1])


class TestProfileFixtures:
    def test_layer_scores_match_recorded_values(self, fixtures):
        ref = load_features(fixtures / "profile" / "ref.rafs")
        expected = json.loads((fixtures / "expected.json").read_text())
        settings = Settings()
        values = []
        for entry in expected["profile_layers"]:
            idx = entry["layer_index"]
            fs = load_features(fixtures / "profile" / f"layer{idx}.rafs")
            got = score_pair(fs, ref, settings).value
            assert got == pytest.approx(entry["value"], abs=expected["tolerance"])
            values.append(got)
        assert all(b > a for a, b in zip(values, values[1:]))
