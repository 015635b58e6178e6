import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trail_surface.errors import InvalidSegment, NonMonotonicU, SingularFit, TooFewValidSegments
from trail_surface.features import (
    Method,
    SegmentFeatures,
    derivative_zero_crossings,
    direction_changes,
    fit_rmse,
    nearest_rank,
    ride_features,
    segment_features,
    segment_fit_rmse,
    slope_direction_changes,
)
from trail_surface.geo import chord_align

from conftest import make_segment, rotate, sine_xy


# ------------------------------------------------------------------ method 1

def test_m1_monotone_drift():
    assert direction_changes(np.linspace(0, 5, 30)) == (0, 0.0)


def test_m1_sine_counts_extrema():
    seg = make_segment(sine_xy(3, 8))
    count, freq = slope_direction_changes(seg)
    n = len(seg.points)
    assert abs(count - 6) <= 1
    assert freq == pytest.approx(count / (n - 2))


def test_m1_flat_chord():
    seg = make_segment(np.column_stack([np.arange(10.0), np.zeros(10)]))
    assert slope_direction_changes(seg) == (0, 0.0)


def test_m1_zero_steps_carry_sign():
    # plateau in the middle of a rise is not a change of direction
    assert direction_changes(np.array([0, 1, 1, 1, 2, 3.0]))[0] == 0
    assert direction_changes(np.array([0, 1, 1, 0.0]))[0] == 1


def test_m1_invalid_segment():
    seg = make_segment([[0, 0], [1, 0], [2, 0]])
    with pytest.raises(InvalidSegment):
        slope_direction_changes(seg)


# ------------------------------------------------------------------ method 2

def test_m2_collinear():
    seg = make_segment(np.column_stack([np.arange(12.0), 0.5 * np.arange(12.0)]))
    assert segment_fit_rmse(seg) == pytest.approx(0.0, abs=1e-9)


def test_m2_sine_rms():
    amplitude = 2.0
    seg = make_segment(sine_xy(3, 200, amplitude=amplitude))
    # RMS of a sinusoid about its zero mean line
    assert segment_fit_rmse(seg) == pytest.approx(amplitude / math.sqrt(2), rel=0.15)


def test_m2_odd_points_offset():
    u = np.array([0.0, 1.0, 2.0, 3.0])
    v = np.array([0.0, 1.0, 0.0, 1.0])
    assert fit_rmse(u, v) == pytest.approx(1.0, abs=1e-9)


def test_m2_singular_fit():
    u = np.array([1.0, 0.0, 1.0, 2.0, 1.0])
    with pytest.raises(SingularFit):
        fit_rmse(u, np.array([0.0, 1.0, 2.0, 3.0, 4.0]))


# ------------------------------------------------------------------ method 3

def test_m3_straight_segment():
    # "zero or only 2 points of zero crossings" on straight paths
    seg = make_segment(np.column_stack([np.arange(20.0), 1e-3 * np.arange(20.0)]))
    assert derivative_zero_crossings(seg) == 0


def test_m3_sine_three_periods():
    seg = make_segment(sine_xy(3, 50))
    assert abs(derivative_zero_crossings(seg) - 6) <= 1
    assert abs(derivative_zero_crossings(seg, strict_u=True) - 6) <= 1


def test_m3_four_collinear():
    seg = make_segment([[0, 0], [1, 1], [2, 2], [3, 3]])
    assert derivative_zero_crossings(seg) == 0


def test_m3_strict_u_rejects_backtracking():
    xy = [[0, 0], [5, 1], [3, 2], [8, 1], [10, 0]]
    seg = make_segment(xy)
    with pytest.raises(NonMonotonicU):
        derivative_zero_crossings(seg, strict_u=True)
    assert derivative_zero_crossings(seg) >= 0
    assert segment_features(seg, strict_u=True) is None
    assert segment_features(seg) is not None


def brute_central_sign_changes(v):
    signs = []
    for i in range(1, len(v) - 1):
        d = v[i + 1] - v[i - 1]
        if abs(d) > 1e-6:
            signs.append(d > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(6, 60))
def test_m3_against_loop_oracle(seed, n):
    r = np.random.default_rng(seed)
    u = np.cumsum(r.uniform(0.5, 2.0, n))
    seg = make_segment(np.column_stack([u, r.normal(size=n)]))
    ua, va = chord_align(seg.xy())
    assert derivative_zero_crossings(seg) == brute_central_sign_changes(va.tolist())
    if np.all(np.diff(ua) > 0):
        assert derivative_zero_crossings(seg, strict_u=True) == derivative_zero_crossings(seg)


def test_m3_smooth_curve_counts_extrema():
    # sin over [0, 5*pi] has extrema at pi/2, 3pi/2, ..., 9pi/2
    v = np.sin(np.linspace(0, 5 * math.pi, 200))
    seg = make_segment(np.column_stack([np.linspace(0, 50, 200), v]))
    assert derivative_zero_crossings(seg) == 5
    assert slope_direction_changes(seg)[0] == 5


# ------------------------------------------------------------ invariances

def _noisy_segments(seed, count=5):
    r = np.random.default_rng(seed)
    out = []
    for k in range(count):
        xy = sine_xy(1.5, 20, amplitude=3.0, wavelength=30.0) + r.normal(scale=0.7, size=(31, 2))
        out.append(make_segment(xy, k))
    return out


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-5e3, 5e3), st.floats(-5e3, 5e3), st.integers(0, 1000))
def test_features_rigid_motion_invariant(theta, dx, dy, seed):
    for seg in _noisy_segments(seed, 2):
        moved = make_segment(rotate(seg.xy(), theta, (dx, dy)), seg.index)
        a, b = segment_features(seg), segment_features(moved)
        assert a.m1_count == b.m1_count
        assert a.m3_zero_crossings == b.m3_zero_crossings
        assert a.m2_fit_rmse == pytest.approx(b.m2_fit_rmse, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 1000))
def test_m1_m3_reversal_invariant(seed):
    for seg in _noisy_segments(seed, 2):
        rev = make_segment(seg.xy()[::-1], seg.index)
        assert slope_direction_changes(rev)[0] == slope_direction_changes(seg)[0]
        assert derivative_zero_crossings(rev) == derivative_zero_crossings(seg)


def test_monotone_in_amplitude_and_periods():
    rmses = [segment_fit_rmse(make_segment(sine_xy(2, 16, amplitude=a))) for a in (0.5, 1, 2, 4, 8)]
    assert rmses == sorted(rmses)
    m1 = [slope_direction_changes(make_segment(sine_xy(p, 16)))[0] for p in (1, 2, 3, 4, 5)]
    m3 = [derivative_zero_crossings(make_segment(sine_xy(p, 16))) for p in (1, 2, 3, 4, 5)]
    assert m1 == sorted(m1)
    assert m3 == sorted(m3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 40))
def test_count_bounds(seed, n):
    xy = np.cumsum(np.random.default_rng(seed).normal(size=(n, 2)) + [1.0, 0.0], axis=0)
    f = segment_features(make_segment(xy))
    if f is None:
        return
    assert 0 <= f.m1_count <= n - 2
    assert 0.0 <= f.m1_slope_change_freq <= 1.0
    assert 0 <= f.m3_zero_crossings <= n - 2
    assert f.m2_fit_rmse >= 0.0


# ------------------------------------------------------------ ride summaries

def _feats(values, method=Method.M2):
    return [SegmentFeatures(i, 0, 0.0, float(v), 0, 10) for i, v in enumerate(values)]


def test_ride_constant():
    rf = ride_features("r", _feats([2.5] * 40))[Method.M2]
    assert (rf.mean, rf.median, rf.max, rf.p90, rf.stddev) == (2.5, 2.5, 2.5, 2.5, 0.0)
    assert rf.n_valid_segments == 40


def test_ride_one_to_hundred():
    rf = ride_features("r", _feats(range(1, 101)))[Method.M2]
    assert rf.median == 50.5
    assert rf.p90 == 90
    assert rf.max == 100
    assert rf.mean == 50.5


def test_ride_skips_invalid_and_needs_ten():
    feats = _feats(range(9)) + [None] * 91
    with pytest.raises(TooFewValidSegments):
        ride_features("r", feats)
    rf = ride_features("r", _feats(range(10)) + [None] * 90)[Method.M2]
    assert rf.n_valid_segments == 10
    assert rf.vector()[0] <= rf.max


def test_nearest_rank():
    assert nearest_rank([5, 1, 3], 90) == 5
    assert nearest_rank([1, 2, 3, 4, 5, 6, 7, 8, 9, 10], 90) == 9
