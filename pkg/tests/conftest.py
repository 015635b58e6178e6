import math

import numpy as np
import pytest

from trail_surface.geo import PlanarPoint
from trail_surface.segmentation import Segment


def planar(xy) -> list[PlanarPoint]:
    """PlanarPoints with cumulative arc length for an (n, 2) array."""
    xy = np.asarray(xy, dtype=float)
    s = np.concatenate(([0.0], np.cumsum(np.hypot(*np.diff(xy, axis=0).T))))
    return [PlanarPoint(float(x), float(y), float(si)) for (x, y), si in zip(xy, s)]


def make_segment(xy, index: int = 0) -> Segment:
    pts = planar(xy)
    return Segment(index, tuple(pts), pts[0].s, pts[-1].s, len(pts) >= 4)


def sine_xy(periods: float, per_period: int, amplitude: float = 1.0, wavelength: float = 10.0):
    n = int(round(periods * per_period)) + 1
    u = np.linspace(0.0, periods * wavelength, n)
    return np.column_stack([u, amplitude * np.sin(2 * math.pi * u / wavelength)])


def rotate(xy, theta: float, shift=(0.0, 0.0)):
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    return np.asarray(xy, dtype=float) @ R.T + np.asarray(shift)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, printed after the run

def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config._criteria = []


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    detail = dict(item.user_properties).get("detail")
    if call.when != "call" or (marker is None and detail is None):
        return
    outcome = "PASS" if call.excinfo is None else "FAIL"
    n = marker.args[0] if marker else None
    item.config._criteria.append((n, item.name, outcome, detail or ""))


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    rows = sorted(config._criteria, key=lambda r: (r[0] is None, r[0] or 0, r[1]))
    for n, name, outcome, detail in rows:
        head = f"criterion {n}" if n is not None else "supplementary"
        terminalreporter.write_line(f"{head}: {outcome}  {name}  {detail}".rstrip())
