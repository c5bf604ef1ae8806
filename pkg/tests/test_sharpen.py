import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reamp.resonance import ResonanceCloud
from reamp.sharpen import (ChangePointSet, DensityCurve, SharpenConfig, auto_bandwidth,
                           cloud_histogram, double_sharpen, localize, nadaraya_watson)


def test_point_mass_histogram():
    curve = cloud_histogram(ResonanceCloud(np.full(10_000, 40), 100), 50)
    assert curve.dx == pytest.approx(99 / 50)
    nz = np.flatnonzero(curve.y)
    assert nz.size == 1
    lo, hi = curve.x[nz[0]] - curve.dx / 2, curve.x[nz[0]] + curve.dx / 2
    assert lo <= 40 < hi
    assert curve.y[nz[0]] == pytest.approx(1 / curve.dx)
    assert curve.count == 10_000


def test_histogram_integrates_to_one_and_is_flat_for_uniform_cloud():
    cloud = ResonanceCloud(np.tile(np.arange(1, 100), 50), 100)
    curve = cloud_histogram(cloud, 99)
    assert (curve.y * curve.dx).sum() == pytest.approx(1, abs=1e-9)
    assert np.ptp(curve.y) == pytest.approx(0, abs=1e-12)
    assert np.all(np.diff(curve.x) > 0)


def test_empty_cloud():
    with pytest.raises(ValueError):
        cloud_histogram(ResonanceCloud(np.array([], dtype=int), 10), 5)


def test_nw_constant_and_symmetry():
    xs = np.linspace(0, 10, 11)
    assert nadaraya_watson(3.3, xs, np.full(11, 2.5), 1.7) == pytest.approx(2.5)
    assert nadaraya_watson(5.0, xs, 3 * xs - 1, 2.0) == pytest.approx(14.0)


def test_nw_small_bandwidth_interpolates():
    xs = np.array([0.0, 1.0, 2.0])
    ys = np.array([4.0, -1.0, 7.0])
    assert nadaraya_watson(1.0, xs, ys, 1e-3) == pytest.approx(-1.0)


def test_nw_far_query_falls_back_to_nearest():
    xs = np.array([0.0, 1.0, 2.0])
    ys = np.array([4.0, -1.0, 7.0])
    assert nadaraya_watson(1e6, xs, ys, 1e-3) == 7.0
    assert nadaraya_watson(-1e6, xs, ys, 1e-3) == 4.0


def test_nw_input_checks():
    with pytest.raises(ValueError):
        nadaraya_watson(0, [1.0], [1.0], 1.0)
    with pytest.raises(ValueError):
        nadaraya_watson(0, [1.0, 2.0], [1.0, 2.0], 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=20), st.floats(0.05, 20),
       st.floats(-60, 60))
def test_nw_convex_combination(ys, h, xq):
    xs = np.arange(len(ys), dtype=float)
    v = nadaraya_watson(xq, xs, np.array(ys), h)
    assert min(ys) - 1e-9 <= v <= max(ys) + 1e-9


def scripted_double_sharpen(x, y, h):
    """Loop transcription of the two sharpening steps and final smooth."""
    def nw(ym):
        out = []
        for xq in x:
            k = [math.exp(-0.5 * ((xq - xi) / h) ** 2) for xi in x]
            out.append(sum(ki * yi for ki, yi in zip(k, ym)) / sum(k))
        return out

    y1 = [a + b - g for a, b, g in zip(y, y, nw(y))]
    y2 = [a + b - g for a, b, g in zip(y, y1, nw(y1))]
    return [max(v, 0.0) for v in nw(y2)]


def test_five_bin_toy_against_hand_iteration():
    x = np.arange(1.0, 6.0)
    y = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    out = double_sharpen(DensityCurve(x, y), SharpenConfig(bandwidth=1.0))
    expected = scripted_double_sharpen(x.tolist(), y.tolist(), 1.0)
    np.testing.assert_allclose(out.y, expected, rtol=1e-12, atol=1e-14)
    assert int(np.argmax(out.y)) == 2
    # sharpening concentrates the mass relative to a plain smooth
    plain = [nadaraya_watson(v, x, y, 1.0) for v in x]
    assert out.y[2] > plain[2]


def test_constant_curve_is_a_fixed_point():
    x = np.linspace(0.5, 99.5, 40)
    out = double_sharpen(DensityCurve(x, np.full(40, 0.3)))
    np.testing.assert_allclose(out.y, 0.3, rtol=1e-12)


def test_single_peak_stays_within_one_bin():
    rng = np.random.default_rng(0)
    x = np.linspace(1.05, 98.95, 90)
    for _ in range(20):
        centre, width = rng.uniform(15, 85), rng.uniform(1, 8)
        y = np.exp(-0.5 * ((x - centre) / width) ** 2) * rng.uniform(0.5, 2)
        out = double_sharpen(DensityCurve(x, y, 5000))
        assert abs(int(np.argmax(out.y)) - int(np.argmax(y))) <= 1
        assert out.y.min() >= 0


def test_auto_bandwidth_rule():
    cand = np.repeat([20, 40], 500)
    curve = cloud_histogram(ResonanceCloud(cand, 100), 99)
    w = curve.y / curve.y.sum()
    mean = (w * curve.x).sum()
    sd = math.sqrt((w * (curve.x - mean) ** 2).sum())
    assert auto_bandwidth(curve) == pytest.approx(1.06 * sd * 1000 ** -0.2)
    narrow = cloud_histogram(ResonanceCloud(np.full(100, 7), 100), 20)
    assert auto_bandwidth(narrow) == pytest.approx(narrow.dx)


@pytest.mark.parametrize("kwargs", [dict(nb2=3), dict(bandwidth=0), dict(bandwidth="silverman"),
                                    dict(threshold=0), dict(threshold=1)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SharpenConfig(**kwargs)


def test_localize_single_peak_ceiling():
    x = np.array([38.7, 39.7, 40.7])
    assert localize(DensityCurve(x, np.array([0.1, 1.0, 0.2])), n=100).estimates == (40,)


def test_localize_flat_curve_is_empty():
    assert len(localize(DensityCurve(np.arange(10.0), np.ones(10)), n=11)) == 0
    assert len(localize(DensityCurve(np.arange(10.0), np.zeros(10)), n=11)) == 0


def test_localize_plateau_left_end_and_threshold():
    x = np.arange(1.0, 9.0) + 0.5
    y = np.array([0, 1, 1, 0, 0.04, 0, 0.3, 0])
    assert localize(DensityCurve(x, y), 0.05, n=10).estimates == (3, 8)
    assert localize(DensityCurve(x, y), 0.03, n=10).estimates == (3, 6, 8)
    assert localize(DensityCurve(x, y), 0.5, n=10, relative=False).estimates == (3,)


def test_localize_clamps_to_valid_cuts():
    x = np.array([97.0, 98.0, 99.2, 100.0])
    assert localize(DensityCurve(x, np.array([0, 0, 1.0, 0])), n=100).estimates == (99,)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=3, max_size=40), st.floats(0.01, 0.98),
       st.floats(0.01, 0.98))
def test_threshold_is_monotone(ys, t1, t2):
    lo, hi = sorted((t1, t2))
    curve = DensityCurve(np.arange(len(ys), dtype=float) + 0.5, np.array(ys))
    a = localize(curve, lo, n=len(ys) + 1)
    b = localize(curve, hi, n=len(ys) + 1)
    assert set(b.estimates) <= set(a.estimates)
    assert list(a.estimates) == sorted(set(a.estimates))


def test_change_point_set_must_increase():
    with pytest.raises(ValueError):
        ChangePointSet((3, 3))
    assert list(ChangePointSet((1, 5))) == [1, 5]
