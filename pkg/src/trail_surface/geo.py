"""WGS84 geometry primitives: great-circle distance, local planar projection
and chord-aligned segment frames."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateChord, FewerThanTwoPoints, InvalidCoordinate

EARTH_RADIUS_M = 6_371_008.8  # IUGG mean radius


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float
    alt: Optional[float] = None
    t: Optional[float] = None

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0) or math.isnan(self.lat):
            raise InvalidCoordinate(f"latitude {self.lat!r} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0) or math.isnan(self.lon):
            raise InvalidCoordinate(f"longitude {self.lon!r} outside [-180, 180]")


class PlanarPoint(NamedTuple):
    x: float  # meters east
    y: float  # meters north
    s: float  # cumulative arc length from track start


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def project_xy(lat, lon, lat0: float, lon0: float):
    """Equirectangular projection about (lat0, lon0); works on scalars or arrays."""
    k = EARTH_RADIUS_M * math.pi / 180.0
    x = k * (np.asarray(lon, dtype=float) - lon0) * math.cos(math.radians(lat0))
    y = k * (np.asarray(lat, dtype=float) - lat0)
    return x, y


def unproject_xy(x, y, lat0: float, lon0: float):
    """Inverse of :func:`project_xy`."""
    k = EARTH_RADIUS_M * math.pi / 180.0
    lat = lat0 + np.asarray(y, dtype=float) / k
    lon = lon0 + np.asarray(x, dtype=float) / (k * math.cos(math.radians(lat0)))
    return lat, lon


def project_track(points: Sequence[GeoPoint]) -> list[PlanarPoint]:
    """Project a track onto a local plane centred on its mean lat/lon.

    Arc length ``s`` is the cumulative planar Euclidean distance. Valid for
    rides spanning well under half a degree (within 1% of haversine).
    """
    if len(points) < 2:
        raise FewerThanTwoPoints(f"need at least 2 points, got {len(points)}")
    lat = np.array([p.lat for p in points])
    lon = np.array([p.lon for p in points])
    x, y = project_xy(lat, lon, float(lat.mean()), float(lon.mean()))
    s = np.concatenate(([0.0], np.cumsum(np.hypot(np.diff(x), np.diff(y)))))
    return [PlanarPoint(*row) for row in zip(x.tolist(), y.tolist(), s.tolist())]


def as_xy(points) -> np.ndarray:
    """(n, 2) float array of planar x/y from PlanarPoints or an array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError("expected a sequence of points with x and y")
    return arr[:, :2]


def chord_align(seg) -> tuple[np.ndarray, np.ndarray]:
    """Rigidly move a segment so its first point is the origin and its last
    point lies on the positive u-axis.

    Returns ``(u, v)``: distance along the chord and signed lateral offset
    (positive to the left of the direction of travel).
    """
    xy = as_xy(seg)
    if len(xy) < 2:
        raise FewerThanTwoPoints(f"need at least 2 points, got {len(xy)}")
    d = xy - xy[0]
    chord = d[-1]
    length = math.hypot(chord[0], chord[1])
    if length <= 1e-9:
        raise DegenerateChord("first and last point coincide")
    c, s = chord / length
    u = d[:, 0] * c + d[:, 1] * s
    v = -d[:, 0] * s + d[:, 1] * c
    # pin the endpoints exactly
    v[0] = 0.0
    v[-1] = 0.0
    u[0] = 0.0
    u[-1] = length
    return u, v
