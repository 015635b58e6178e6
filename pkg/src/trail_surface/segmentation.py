"""Split a projected track into 100 equal arc-length windows."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ZeroLengthTrack
from .geo import PlanarPoint

N_SEGMENTS = 100
MIN_SEGMENT_POINTS = 4


@dataclass(frozen=True)
class Segment:
    index: int
    points: tuple[PlanarPoint, ...]
    s_start: float
    s_end: float
    valid: bool

    @property
    def length(self) -> float:
        return self.s_end - self.s_start

    def xy(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points], dtype=float).reshape(-1, 2)

    def arc(self) -> np.ndarray:
        return np.array([p.s for p in self.points], dtype=float)


def segment_track(points: Sequence[PlanarPoint], n_segments: int = N_SEGMENTS) -> list[Segment]:
    """Cut ``[0, L]`` at ``k * L / n_segments``.

    Each window is closed on both sides, so a point sitting exactly on a
    boundary is shared by the two neighbouring segments. Windows with fewer
    than four points are returned with ``valid=False``.
    """
    if len(points) == 0:
        raise ZeroLengthTrack("empty track")
    s = np.array([p.s for p in points], dtype=float)
    total = float(s[-1])
    if not total > 0:
        raise ZeroLengthTrack("track has zero arc length")
    bounds = np.arange(n_segments + 1) * (total / n_segments)
    bounds[-1] = total
    # half-open search on the left edge, closed on the right
    lo = np.searchsorted(s, bounds[:-1], side="left")
    hi = np.searchsorted(s, bounds[1:], side="right")
    out = []
    for k in range(n_segments):
        pts = tuple(points[lo[k]:hi[k]])
        out.append(Segment(k, pts, float(bounds[k]), float(bounds[k + 1]),
                           len(pts) >= MIN_SEGMENT_POINTS))
    return out
