import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trail_surface.errors import ZeroLengthTrack
from trail_surface.geo import PlanarPoint
from trail_surface.segmentation import segment_track

from conftest import planar


def straight(length, spacing):
    n = int(round(length / spacing)) + 1
    return planar(np.column_stack([np.arange(n) * spacing, np.zeros(n)]))


def test_sparse_track_all_invalid():
    segs = segment_track(straight(1000, 10))
    assert len(segs) == 100
    assert all(2 <= len(s.points) <= 3 for s in segs)
    assert not any(s.valid for s in segs)


def test_dense_track_all_valid():
    segs = segment_track(straight(1000, 1))
    assert len(segs) == 100
    assert all(10 <= len(s.points) <= 11 for s in segs)
    assert all(s.valid for s in segs)
    assert all(s.length == pytest.approx(10.0) for s in segs)


def test_zero_length_track():
    with pytest.raises(ZeroLengthTrack):
        segment_track([PlanarPoint(0, 0, 0), PlanarPoint(0, 0, 0)])


def test_boundary_point_shared():
    segs = segment_track(straight(100, 0.5))
    # s = 1.0 is the boundary between segments 0 and 1
    assert segs[0].points[-1].s == pytest.approx(1.0)
    assert segs[1].points[0].s == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(50, 800))
def test_coverage_invariants(seed, n):
    steps = np.random.default_rng(seed).uniform(0.1, 5.0, size=(n, 2))
    pts = planar(np.cumsum(steps, axis=0))
    segs = segment_track(pts)
    total = pts[-1].s
    assert segs[0].s_start == 0.0 and segs[-1].s_end == total
    for a, b in zip(segs, segs[1:]):
        assert a.s_end == b.s_start
    assert sum(s.length for s in segs) == pytest.approx(total, rel=1e-6)
    seen = np.zeros(len(pts), dtype=int)
    index = {p: i for i, p in enumerate(pts)}
    for s in segs:
        assert s.valid == (len(s.points) >= 4)
        for p in s.points:
            assert s.s_start <= p.s <= s.s_end
            seen[index[p]] += 1
    assert np.all(seen >= 1)
    bounds = {s.s_start for s in segs} | {total}
    for p, c in zip(pts, seen):
        if p.s not in bounds:
            assert c == 1
