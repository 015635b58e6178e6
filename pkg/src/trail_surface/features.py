"""Per-segment squiggliness features and their ride-level summaries.

All three features work on the chord-aligned lateral deviation ``v`` of a
segment (see :func:`trail_surface.geo.chord_align`):

* ``m1``: how often the direction of lateral drift flips (sign changes of
  successive differences of ``v``), as a count and a per-point frequency;
* ``m2``: test RMSE of a straight line fitted to the even-indexed points
  and evaluated on the odd-indexed ones;
* ``m3``: sign changes of the central-difference first derivative of ``v``,
  i.e. interior local extrema.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateChord, InvalidSegment, NonMonotonicU, SingularFit, TooFewValidSegments
from .geo import chord_align
from .segmentation import MIN_SEGMENT_POINTS, Segment

# Lateral steps smaller than this are treated as zero (sign carried forward).
# Far below GPS resolution, far above projection round-off (~1e-9 m).
ZERO_TOL_M = 1e-6

MIN_VALID_SEGMENTS = 10


class Method(str, enum.Enum):
    M1 = "m1"
    M2 = "m2"
    M3 = "m3"


@dataclass(frozen=True)
class SegmentFeatures:
    index: int
    m1_count: int
    m1_slope_change_freq: float
    m2_fit_rmse: float
    m3_zero_crossings: int
    n_points: int

    def scalar(self, method: Method | str) -> float:
        method = Method(method)
        if method is Method.M1:
            return self.m1_slope_change_freq
        if method is Method.M2:
            return self.m2_fit_rmse
        return float(self.m3_zero_crossings)


STAT_NAMES = ("mean", "median", "stddev", "max", "p90")


@dataclass(frozen=True)
class RideFeatures:
    track_id: str
    method: Method
    mean: float
    median: float
    stddev: float
    max: float
    p90: float
    n_valid_segments: int

    def vector(self) -> list[float]:
        return [self.mean, self.median, self.stddev, self.max, self.p90]


def _carried_signs(values: np.ndarray) -> np.ndarray:
    """Signs of ``values`` with near-zero entries dropped (which is what
    carrying the last nonzero sign amounts to when counting changes)."""
    signs = np.sign(values)
    signs[np.abs(values) <= ZERO_TOL_M] = 0
    return signs[signs != 0]


def _sign_changes(values: np.ndarray) -> int:
    signs = _carried_signs(values)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _aligned(seg: Segment) -> tuple[np.ndarray, np.ndarray]:
    if not seg.valid or len(seg.points) < MIN_SEGMENT_POINTS:
        raise InvalidSegment(f"segment {seg.index} has {len(seg.points)} points")
    try:
        return chord_align(seg.xy())
    except DegenerateChord:
        raise InvalidSegment(f"segment {seg.index} starts and ends at the same spot") from None


def direction_changes(v: np.ndarray) -> tuple[int, float]:
    """Count sign flips of successive lateral differences; freq = count / (n - 2)."""
    n = len(v)
    if n < 3:
        return 0, 0.0
    count = _sign_changes(np.diff(v))
    return count, count / (n - 2)


def slope_direction_changes(seg: Segment) -> tuple[int, float]:
    _, v = _aligned(seg)
    return direction_changes(v)


def fit_rmse(u: np.ndarray, v: np.ndarray) -> float:
    """Fit ``v = a*u + b`` on even-indexed points by ordinary least squares
    and return the RMSE on the odd-indexed points."""
    u_fit, v_fit = u[0::2], v[0::2]
    u_test, v_test = u[1::2], v[1::2]
    if len(u_test) == 0:
        raise InvalidSegment("need at least 2 points to form a test set")
    n = len(u_fit)
    mu, mv = u_fit.mean(), v_fit.mean()
    du = u_fit - mu
    sxx = float(du @ du)
    if n < 2 or sxx <= 1e-18 * max(1.0, mu * mu):
        raise SingularFit("fit-set points share the same along-chord position")
    a = float(du @ (v_fit - mv)) / sxx
    b = mv - a * mu
    resid = v_test - (a * u_test + b)
    return math.sqrt(float(resid @ resid) / len(resid))


def segment_fit_rmse(seg: Segment) -> float:
    u, v = _aligned(seg)
    return fit_rmse(u, v)


def derivative_sign_changes(v: np.ndarray, along: np.ndarray) -> int:
    """Zero crossings of the central-difference derivative ``dv/d(along)``.

    ``along`` must be strictly increasing; the caller decides which
    parameter (chord position or arc length) that is.
    """
    if len(v) < 3:
        return 0
    num = v[2:] - v[:-2]
    den = along[2:] - along[:-2]
    if np.any(den <= 0):
        raise NonMonotonicU("parameter is not strictly increasing")
    # the sign of d only depends on num; apply the zero tolerance there
    d = np.where(np.abs(num) <= ZERO_TOL_M, 0.0, num / den)
    signs = np.sign(d)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def derivative_zero_crossings(seg: Segment, strict_u: bool = False) -> int:
    """Number of sign changes in the first derivative of lateral deviation.

    By default the derivative is taken along arc length, which is strictly
    increasing after cleaning; wherever chord position ``u`` is also strictly
    increasing both give the same count. With ``strict_u=True`` the
    derivative is taken along ``u`` and a segment whose ``u`` ever steps
    backwards raises :class:`NonMonotonicU`.
    """
    u, v = _aligned(seg)
    if strict_u:
        if np.any(np.diff(u) <= 0):
            raise NonMonotonicU(f"segment {seg.index}: chord position steps backwards")
        return derivative_sign_changes(v, u)
    return derivative_sign_changes(v, seg.arc())


def segment_features(seg: Segment, strict_u: bool = False) -> Optional[SegmentFeatures]:
    """All three features for one segment, or ``None`` when the segment is
    unusable (too few points, closed loop, degenerate fit, or with
    ``strict_u`` a backtracking chord position)."""
    if not seg.valid:
        return None
    try:
        u, v = _aligned(seg)
        count, freq = direction_changes(v)
        rmse = fit_rmse(u, v)
        if strict_u:
            if np.any(np.diff(u) <= 0):
                return None
            m3 = derivative_sign_changes(v, u)
        else:
            m3 = derivative_sign_changes(v, seg.arc())
    except (InvalidSegment, SingularFit, NonMonotonicU):
        return None
    return SegmentFeatures(seg.index, count, freq, rmse, m3, len(seg.points))


def nearest_rank(values: Sequence[float], q: float) -> float:
    """Nearest-rank percentile (``q`` in (0, 100])."""
    ordered = sorted(values)
    rank = max(1, math.ceil(q / 100.0 * len(ordered)))
    return float(ordered[rank - 1])


def summarize(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    arr = np.asarray(values, dtype=float)
    return (float(arr.mean()), float(np.median(arr)), float(arr.std()),
            float(arr.max()), nearest_rank(arr.tolist(), 90))


def ride_features(track_id: str, segments: Iterable[Optional[SegmentFeatures]]
                  ) -> dict[Method, RideFeatures]:
    """Summary statistics of each method's scalar over the valid segments.

    ``segments`` may contain ``None`` for invalid segments; those are skipped.
    """
    valid = [f for f in segments if f is not None]
    if len(valid) < MIN_VALID_SEGMENTS:
        raise TooFewValidSegments(
            f"{track_id}: {len(valid)} valid segments, need {MIN_VALID_SEGMENTS}")
    out = {}
    for method in Method:
        stats = summarize([f.scalar(method) for f in valid])
        out[method] = RideFeatures(track_id, method, *stats, n_valid_segments=len(valid))
    return out
