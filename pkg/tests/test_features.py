"""Feature containers, normalization, outlier filtering, token pooling."""

from __future__ import annotations

import numpy as np
import pytest

from repalign import (
    AllFiltered,
    FeatureMeta,
    FeatureSet,
    OnlyClsToken,
    OutlierPolicy,
    ShapeMismatch,
    SingleSample,
    TokenFeatureSet,
    ValidationError,
    filter_outliers,
    normalize_channels,
    pool_tokens,
)
from repalign.features import NonFiniteValue
from repalign.pipeline import ensure_pooled

from conftest import rand_features


class TestFeatureSet:
    def test_shape_accessors(self):
        fs = rand_features(0, 6, 3)
        assert (fs.n, fs.d) == (6, 3)

    def test_rejects_non_2d(self):
        with pytest.raises(ValidationError):
            FeatureSet(np.zeros((2, 2, 2), dtype=np.float32))

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            FeatureSet(np.zeros((0, 3), dtype=np.float32))

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteValue):
            FeatureSet(np.array([[1.0, float("nan")]], dtype=np.float32))

    def test_immutable(self):
        fs = rand_features(0, 2, 2)
        with pytest.raises(ValueError):
            fs.data[0, 0] = 1.0

    def test_meta_round_trip(self):
        meta = FeatureMeta(model_id="m", layer_id=2, pooled=False, source_image_count=7)
        assert FeatureMeta.from_dict(meta.to_dict()) == meta


class TestNormalize:
    def test_two_point_channel_maps_to_unit(self):
        fs = FeatureSet(np.array([[1.0, 10.0], [3.0, 10.0]], dtype=np.float32))
        out = normalize_channels(fs)
        np.testing.assert_allclose(out.data[:, 0], [-1.0, 1.0], atol=1e-6)

    def test_constant_channel_maps_to_zero(self):
        fs = FeatureSet(np.full((4, 2), 7.0, dtype=np.float32))
        out = normalize_channels(fs)
        assert (out.data == 0.0).all()

    def test_unit_moments(self):
        out = normalize_channels(rand_features(3, 200, 5))
        x = out.data.astype(np.float64)
        np.testing.assert_allclose(x.mean(axis=0), 0.0, atol=1e-6)
        np.testing.assert_allclose(x.std(axis=0), 1.0, atol=1e-5)

    def test_idempotent(self):
        once = normalize_channels(rand_features(4, 50, 4))
        twice = normalize_channels(once)
        np.testing.assert_allclose(twice.data, once.data, atol=1e-5)

    def test_single_sample_rejected(self):
        with pytest.raises(SingleSample):
            normalize_channels(rand_features(5, 1, 4))

    def test_meta_preserved(self):
        meta = FeatureMeta(model_id="keepme")
        out = normalize_channels(FeatureSet(rand_features(6, 4, 2).data, meta))
        assert out.meta == meta


class TestOutlierFilter:
    def test_norm_outlier_dropped(self):
        base = np.eye(10, 4, dtype=np.float32)
        base[9] = [1000.0, 0.0, 0.0, 0.0]
        fa = FeatureSet(base)
        fb = rand_features(7, 10, 4)
        benign = FeatureSet(fb.data / np.linalg.norm(fb.data, axis=1, keepdims=True))
        out_a, out_b, kept = filter_outliers(fa, benign, OutlierPolicy())
        assert kept == list(range(9))
        assert out_a.n == out_b.n == 9
        np.testing.assert_array_equal(out_a.data, base[:9])
        np.testing.assert_array_equal(out_b.data, benign.data[:9])

    def test_joint_drop_removes_row_from_both(self):
        spike = np.ones((8, 3), dtype=np.float32)
        spike[4] = [500.0, 0.0, 0.0]
        clean = np.ones((8, 3), dtype=np.float32)
        out_a, out_b, kept = filter_outliers(FeatureSet(spike), FeatureSet(clean), OutlierPolicy())
        assert 4 not in kept
        assert out_a.n == out_b.n == len(kept)

    def test_none_policy_passthrough(self):
        fa, fb = rand_features(8, 5, 3), rand_features(9, 5, 3)
        out_a, out_b, kept = filter_outliers(fa, fb, OutlierPolicy("none"))
        assert out_a is fa and out_b is fb
        assert kept == list(range(5))

    def test_no_outliers_returns_inputs(self):
        fa = FeatureSet(np.eye(6, 3, dtype=np.float32))
        fb = FeatureSet(np.eye(6, 3, dtype=np.float32))
        out_a, out_b, kept = filter_outliers(fa, fb, OutlierPolicy())
        assert kept == list(range(6))
        assert out_a is fa

    def test_sample_count_mismatch(self):
        with pytest.raises(ShapeMismatch):
            filter_outliers(rand_features(1, 4, 2), rand_features(1, 5, 2), OutlierPolicy())

    def test_everything_filtered(self):
        fa = FeatureSet(np.array([[1.0, 0.0], [2.0, 0.0]], dtype=np.float32))
        tight = OutlierPolicy("norm_mad", 1e-6)
        with pytest.raises(AllFiltered):
            filter_outliers(fa, fa, tight)

    def test_policy_validation(self):
        with pytest.raises(ValidationError):
            OutlierPolicy("zscore")
        with pytest.raises(ValidationError):
            OutlierPolicy("norm_mad", 0.0)


class TestPoolTokens:
    def test_mean_over_spatial_tokens(self):
        data = np.stack(
            [
                np.array([[9.0, 9.0], [1.0, 2.0], [3.0, 4.0]], dtype=np.float32),
                np.array([[9.0, 9.0], [5.0, 6.0], [7.0, 8.0]], dtype=np.float32),
            ]
        )
        pooled = pool_tokens(TokenFeatureSet(data, cls_present=True))
        np.testing.assert_allclose(pooled.data, [[2.0, 3.0], [6.0, 7.0]])
        assert pooled.meta.pooled is True

    def test_without_cls_all_tokens_pool(self):
        data = np.ones((2, 4, 3), dtype=np.float32)
        pooled = pool_tokens(TokenFeatureSet(data, cls_present=False))
        np.testing.assert_allclose(pooled.data, np.ones((2, 3)))

    def test_single_token_without_cls(self):
        data = np.full((2, 1, 3), 2.5, dtype=np.float32)
        pooled = pool_tokens(TokenFeatureSet(data, cls_present=False))
        np.testing.assert_allclose(pooled.data, np.full((2, 3), 2.5))

    def test_only_cls_token_rejected(self):
        data = np.ones((2, 1, 3), dtype=np.float32)
        with pytest.raises(OnlyClsToken):
            pool_tokens(TokenFeatureSet(data, cls_present=True))

    def test_ensure_pooled_dispatch(self):
        tokens = TokenFeatureSet(np.ones((2, 3, 4), dtype=np.float32))
        pooled = ensure_pooled(tokens)
        assert isinstance(pooled, FeatureSet)
        flat = rand_features(1, 2, 4)
        assert ensure_pooled(flat) is flat
