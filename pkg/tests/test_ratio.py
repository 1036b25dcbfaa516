import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from mtdespeckle.denoise import BoxDenoiser, IdentityDenoiser
from mtdespeckle.errors import DimensionError
from mtdespeckle.ratio import (
    despeckle_ratio,
    despeckle_single,
    form_ratio,
    normalization_factor,
    normalize_super,
    recombine,
)
from mtdespeckle.stack import SuperImage, build_super_image, simulate_stack

positive_images = hnp.arrays(np.float32, (6, 7), elements=st.floats(2.0**-10, 2.0**10, width=32))


def ulps(a, b):
    a = np.asarray(a)
    return np.max(np.abs(a.astype(np.float64) - b) / np.spacing(a))


@pytest.fixture
def scene():
    rng = np.random.default_rng(3)
    return rng.uniform(0.1, 10, (24, 20)).astype(np.float32)


class TestNormalization:
    def test_constant(self):
        assert normalization_factor(np.full((4, 4), 2.5)) == pytest.approx(2.5, rel=1e-15)
        np.testing.assert_array_equal(normalize_super(np.full((4, 4), 2.5)).data, 1.0)

    def test_two_pixels(self):
        s = np.array([[1.0, math.e**2]])
        assert normalization_factor(s) == pytest.approx(math.e, rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.01, 7.0, 100.0])
    def test_homogeneous(self, scene, alpha):
        assert normalization_factor(alpha * scene.astype(np.float64)) == pytest.approx(
            alpha * normalization_factor(scene), rel=1e-13)

    def test_accepts_super_image(self, scene):
        assert normalization_factor(SuperImage(scene, 30.0)) == normalization_factor(scene)

    def test_non_positive(self):
        with pytest.raises(ValueError):
            normalization_factor(np.array([[1.0, 0.0]]))
        with pytest.raises(ValueError):
            normalize_super(np.array([[1.0, -1.0]]))

    @settings(max_examples=50, deadline=None)
    @given(positive_images)
    def test_zero_mean_log(self, s):
        assert abs(np.mean(np.log(normalize_super(s).data))) <= 1e-6

    @pytest.mark.parametrize("alpha", [0.01, 100.0])
    def test_scale_invariance(self, scene, alpha):
        a = normalize_super(scene).data
        b = normalize_super(scene.astype(np.float64) * alpha).data
        assert ulps(a, b) <= 4


class TestRatio:
    def test_noiseless_ratio_is_lambda(self, scene):
        s_norm = normalize_super(scene)
        tau = form_ratio(scene, s_norm)
        np.testing.assert_allclose(tau, s_norm.lam, rtol=1e-6)

    def test_log_range_preserved(self, scene):
        w = scene * np.random.default_rng(0).gamma(1.0, 1.0, scene.shape) + 1e-3
        s = np.random.default_rng(1).uniform(0.5, 50, scene.shape)
        tau = form_ratio(w, normalize_super(s))
        assert abs(np.mean(np.log(tau)) - np.mean(np.log(w))) <= 1e-6

    def test_zero_pixel(self, scene):
        w = scene.copy()
        w[2, 3] = 0
        assert form_ratio(w, normalize_super(scene))[2, 3] == 0

    def test_mismatch(self, scene):
        with pytest.raises(DimensionError):
            form_ratio(scene[:-1], normalize_super(scene))
        with pytest.raises(DimensionError):
            recombine(scene[:, :-1], normalize_super(scene))


class TestRecombine:
    def test_inverse(self, scene):
        w = np.random.default_rng(2).uniform(0.01, 100, scene.shape).astype(np.float32)
        s_norm = normalize_super(scene)
        assert ulps(w, recombine(form_ratio(w, s_norm), s_norm)) <= 4

    def test_constant_lambda_gives_super(self, scene):
        s_norm = normalize_super(scene)
        out = recombine(np.full(scene.shape, s_norm.lam), s_norm)
        assert ulps(scene, out) <= 4

    def test_zero(self, scene):
        assert np.all(recombine(np.zeros(scene.shape), normalize_super(scene)) == 0)

    @settings(max_examples=50, deadline=None)
    @given(positive_images, positive_images)
    def test_inverse_property(self, w, s):
        s_norm = normalize_super(s)
        assert ulps(w, recombine(form_ratio(w, s_norm), s_norm)) <= 4


class TestDespeckleRatio:
    def test_identity_denoiser(self, scene):
        w = scene * np.float32(0.7)
        s = np.random.default_rng(4).uniform(0.2, 20, scene.shape).astype(np.float32)
        assert ulps(w, despeckle_ratio(w, s, IdentityDenoiser())) <= 4

    def test_noiseless_fixed_point(self, scene):
        out = despeckle_ratio(scene, scene, BoxDenoiser(2, debias=False))
        np.testing.assert_allclose(out, scene, rtol=1e-6)

    @pytest.mark.parametrize("alpha", [0.01, 100.0])
    def test_scale_invariance_bitwise(self, scene, alpha):
        w = scene * np.random.default_rng(5).exponential(1.0, scene.shape).astype(np.float32)
        s = build_super_image(simulate_stack(scene, 8, 1.0, seed=1)).data
        d = BoxDenoiser(2)
        a = despeckle_ratio(w, s, d)
        b = despeckle_ratio(w, s.astype(np.float64) * alpha, d)
        assert a.tobytes() == b.tobytes()

    def test_unit_super_matches_single(self, scene):
        w = scene * np.random.default_rng(6).exponential(1.0, scene.shape).astype(np.float32)
        d = BoxDenoiser(1)
        np.testing.assert_array_equal(despeckle_ratio(w, np.ones_like(w), d),
                                      despeckle_single(w, d))

    def test_ratio_beats_single_on_edges(self):
        v = np.ones((64, 64), dtype=np.float32)
        v[:, 32:] = 100.0
        v[20] = 10.0
        stack = simulate_stack(v, 25, 1.0, seed=8)
        s = build_super_image(stack)
        d = BoxDenoiser(2)
        def err(x):
            return np.mean((np.log(x) - np.log(v)) ** 2)
        assert err(despeckle_ratio(stack.images[0], s, d)) < err(despeckle_single(stack.images[0], d))


class TestDespeckleSingle:
    def test_identity(self, scene):
        assert ulps(scene, despeckle_single(scene, IdentityDenoiser())) <= 4

    def test_variance_reduction(self):
        w = simulate_stack(np.ones((256, 256)), 2, 1.0, seed=3).images[0]
        out = despeckle_single(w, BoxDenoiser(3))
        assert w.astype(np.float64).var() / out.astype(np.float64).var() >= 10

    def test_constant_input(self):
        out = despeckle_single(np.full((16, 16), 2.0, np.float32), BoxDenoiser(3))
        assert np.ptp(out) == 0
        assert out[0, 0] == pytest.approx(2.0 * math.exp(0.5772156649015329), rel=1e-6)
