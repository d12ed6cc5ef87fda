from __future__ import annotations

import numpy as np
import pytest

from pathsig import (
    Path,
    PreprocessConfig,
    concat,
    gaussian_smooth,
    inverse,
    one_variation,
    preprocess,
    reduce_path,
    reparametrize,
)
from conftest import random_path


def path_of(points, times=None) -> Path:
    values = np.asarray(points, dtype=float)
    if times is None:
        times = np.arange(len(values), dtype=float)
    return Path(np.asarray(times, dtype=float), values)


# ---------------------------------------------------------------------------
# construction


def test_times_must_strictly_increase():
    with pytest.raises(ValueError):
        Path(np.array([0.0, 0.0]), np.zeros((2, 1)))
    with pytest.raises(ValueError):
        Path(np.array([1.0, 0.0]), np.zeros((2, 1)))


def test_values_must_be_finite():
    with pytest.raises(ValueError):
        Path(np.array([0.0, 1.0]), np.array([[0.0], [np.nan]]))


def test_shape_and_name_validation():
    with pytest.raises(ValueError):
        Path(np.array([0.0, 1.0]), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        Path(np.array([0.0, 1.0]), np.zeros((2, 2)), ("only-one",))


def test_default_channel_names():
    a = path_of([[0.0, 0.0], [1.0, 1.0]])
    assert a.channel_names == ("c1", "c2")


def test_arrays_are_read_only(rng):
    a = random_path(rng)
    with pytest.raises(ValueError):
        a.times[0] = -1.0
    with pytest.raises(ValueError):
        a.values[0, 0] = 42.0


def test_channel_is_one_based(rng):
    a = random_path(rng, n_channels=3)
    assert np.array_equal(a.channel(2), a.values[:, 1])
    with pytest.raises(ValueError):
        a.channel(0)
    with pytest.raises(ValueError):
        a.channel(4)


def test_uniformity_and_duration():
    assert path_of([[0.0], [1.0], [2.0]]).is_uniform()
    assert not path_of([[0.0], [1.0], [2.0]], times=[0.0, 1.0, 3.0]).is_uniform()
    assert path_of([[0.0], [1.0]], times=[2.0, 5.0]).duration == 3.0


# ---------------------------------------------------------------------------
# concatenation and inversion


def test_concat_translates_and_merges_junction():
    a = path_of([[0.0], [1.0]])
    b = path_of([[5.0], [7.0]])
    c = concat(a, b)
    # b is translated to start where a ends: displacement 2 continues from 1
    assert c.n_samples == 3
    assert np.allclose(c.values[:, 0], [0.0, 1.0, 3.0])
    assert c.times[-1] > c.times[-2]


def test_concat_with_point_path_is_identity(rng):
    a = random_path(rng)
    b = Path(np.array([0.0]), np.array([[9.0, 9.0]]))
    c = concat(a, b)
    assert np.array_equal(c.values, a.values)


def test_inverse_is_an_exact_involution(rng):
    a = random_path(rng, uniform=False)
    back = inverse(inverse(a))
    assert np.array_equal(back.times, a.times)
    assert np.array_equal(back.values, a.values)


def test_inverse_reverses_values(rng):
    a = random_path(rng)
    assert np.array_equal(inverse(a).values, a.values[::-1])


# ---------------------------------------------------------------------------
# tree-like reduction


def test_reduce_out_and_back_to_point():
    a = path_of([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]])
    r = reduce_path(a)
    assert r.n_samples == 1
    assert np.array_equal(r.values[0], [0.0, 0.0])


def test_reduce_partial_backtrack():
    a = path_of([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 5.0]])
    r = reduce_path(a)
    assert np.allclose(r.values, [[0.0, 0.0], [1.0, 0.0], [1.0, 5.0]])


def test_reduce_overshoot_backtrack():
    a = path_of([[0.0], [1.0], [-1.0]])
    r = reduce_path(a)
    assert np.allclose(r.values, [[0.0], [-1.0]])


def test_reduce_drops_zero_segments():
    a = path_of([[0.0], [0.0], [1.0]])
    assert reduce_path(a).n_samples == 2


def test_reduce_of_concat_with_inverse_is_a_point(rng):
    for _ in range(10):
        a = random_path(rng, n_samples=5)
        r = reduce_path(concat(a, inverse(a)))
        assert r.n_samples == 1


def test_reduce_keeps_irreducible_path():
    a = path_of([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    r = reduce_path(a)
    assert np.array_equal(r.values, a.values)


# ---------------------------------------------------------------------------
# 1-variation


def test_one_variation_single_segment():
    a = path_of([[0.0, 0.0], [3.0, 4.0]])
    assert one_variation(a) == pytest.approx(5.0)


def test_one_variation_constant_path():
    assert one_variation(path_of([[2.0], [2.0]])) == 0.0


def test_one_variation_additive_under_concat(rng):
    a = random_path(rng)
    b = random_path(rng)
    assert one_variation(concat(a, b)) == pytest.approx(
        one_variation(a) + one_variation(b), abs=1e-12
    )


# ---------------------------------------------------------------------------
# reparametrization


def test_reparametrize_keeps_values(rng):
    a = random_path(rng, n_samples=5)
    warped = reparametrize(a, lambda t: t ** 3 + t)
    assert np.array_equal(warped.values, a.values)
    assert np.all(np.diff(warped.times) > 0)


def test_reparametrize_rejects_non_monotone_warp(rng):
    a = random_path(rng, n_samples=5)
    with pytest.raises(ValueError):
        reparametrize(a, lambda t: -t)
    with pytest.raises(ValueError):
        reparametrize(a, lambda t: np.zeros_like(t))


# ---------------------------------------------------------------------------
# smoothing


def test_smooth_sigma_zero_is_identity(rng):
    a = random_path(rng)
    assert np.array_equal(gaussian_smooth(a, 0.0).values, a.values)


def test_smooth_constant_series_unchanged():
    a = path_of([[3.0]] * 50)
    out = gaussian_smooth(a, 2.5)
    assert np.allclose(out.values, 3.0, atol=1e-12)


def test_smooth_reduces_noise_variance(rng):
    noise = rng.normal(size=(400, 1))
    a = Path(np.arange(400, dtype=float), noise)
    out = gaussian_smooth(a, 10.0)
    assert out.values.var() < a.values.var()


def test_smooth_requires_uniform_grid(rng):
    a = random_path(rng, uniform=False)
    with pytest.raises(ValueError):
        gaussian_smooth(a, 1.0)


def test_smooth_impulse_is_symmetric():
    values = np.zeros((41, 1))
    values[20, 0] = 1.0
    out = gaussian_smooth(Path(np.arange(41, dtype=float), values), 3.0)
    assert np.allclose(out.values, out.values[::-1], atol=1e-15)
    assert out.values.sum() == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# preprocess


def test_preprocess_all_off_returns_input(rng):
    a = random_path(rng)
    assert preprocess(a, PreprocessConfig()) is a


def test_preprocess_config_validation():
    with pytest.raises(ValueError):
        PreprocessConfig(smooth_sigma=-1.0)
    with pytest.raises(ValueError):
        PreprocessConfig(normalize="weird")


def test_center_makes_channel_means_zero(rng):
    a = random_path(rng, n_samples=40, n_channels=3)
    out = preprocess(a, PreprocessConfig(center=True))
    assert np.allclose(out.values.mean(axis=0), 0.0, atol=1e-12)


def test_per_channel_normalize_forces_unit_range(rng):
    a = random_path(rng, n_samples=40, n_channels=3)
    out = preprocess(a, PreprocessConfig(normalize="per"))
    ranges = out.values.max(axis=0) - out.values.min(axis=0)
    assert np.allclose(ranges, 1.0, atol=1e-12)


def test_global_normalize_scales_all_channels_alike(rng):
    a = random_path(rng, n_samples=40, n_channels=3)
    out = preprocess(a, PreprocessConfig(normalize="global"))
    ranges = out.values.max(axis=0) - out.values.min(axis=0)
    assert ranges.max() == pytest.approx(1.0, abs=1e-12)
    expected = a.values * (1.0 / (a.values.max(0) - a.values.min(0)).max())
    assert np.allclose(out.values, expected, atol=1e-12)


def test_normalize_constant_channel_warns_and_leaves_it():
    values = np.column_stack([np.full(10, 7.0), np.arange(10.0)])
    a = Path(np.arange(10.0), values)
    with pytest.warns(UserWarning):
        out = preprocess(a, PreprocessConfig(normalize="per"))
    assert np.array_equal(out.values[:, 0], values[:, 0])


def test_prepend_zero_adds_origin_sample(rng):
    a = random_path(rng, n_samples=10)
    out = preprocess(a, PreprocessConfig(prepend_zero=True))
    assert out.n_samples == a.n_samples + 1
    assert np.all(out.values[0] == 0.0)
    assert out.times[0] == pytest.approx(a.times[0] - 1.0)
    assert np.array_equal(out.values[1:], a.values)


def test_smoothing_happens_before_normalization(rng):
    # if normalization ran first, smoothing would shrink the range below 1
    a = random_path(rng, n_samples=200)
    cfg = PreprocessConfig(smooth_sigma=3.0, normalize="per")
    out = preprocess(a, cfg)
    ranges = out.values.max(axis=0) - out.values.min(axis=0)
    assert np.allclose(ranges, 1.0, atol=1e-12)
