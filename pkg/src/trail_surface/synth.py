"""Deterministic synthetic rides with known road-surface labels.

A ride is a straight centreline at a compass heading. Squiggly rides add a
lateral sine wave. GPS error is Gaussian in the local plane, either white
(independent per fix) or smoothed along the track to mimic the slowly
wandering error of real receivers. Points are then mapped back to lat/lon so
the whole ingest path is exercised.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SpecInvalid
from .geo import GeoPoint, unproject_xy
from .ingest import Label, LabeledTrack, Track

T0 = 1_600_000_000.0  # timestamp of the first fix
SPEED_MPS = 5.0


@dataclass(frozen=True)
class SynthSpec:
    kind: Label = Label.STRAIGHT
    length: float = 5000.0          # centreline length, m
    spacing: float = 2.0            # centreline distance between fixes, m
    amplitude: float = 10.0         # lateral sine amplitude, m (squiggly only)
    wavelength: float = 50.0        # m
    noise_sigma: float = 0.0        # per-axis GPS error std, m
    noise_corr_length: float = 0.0  # smoothing length of the error, m; 0 = white
    heading: float = 0.0            # degrees clockwise from north
    origin: GeoPoint = GeoPoint(45.0, 7.0)
    seed: int = 0

    def __post_init__(self):
        problems = []
        if not self.length > 0:
            problems.append("length must be > 0")
        if not self.spacing > 0:
            problems.append("spacing must be > 0")
        if not self.wavelength > 2 * self.spacing:
            problems.append("wavelength must exceed 2 * spacing")
        if not self.noise_sigma >= 0:
            problems.append("noise_sigma must be >= 0")
        if not self.noise_corr_length >= 0:
            problems.append("noise_corr_length must be >= 0")
        if self.amplitude < 0:
            problems.append("amplitude must be >= 0")
        if problems:
            raise SpecInvalid("; ".join(problems))

    def replace(self, **changes) -> "SynthSpec":
        return dataclasses.replace(self, **changes)


def _noise(rng: np.random.Generator, n: int, spec: SynthSpec) -> np.ndarray:
    if spec.noise_sigma == 0:
        return np.zeros((n, 2))
    if spec.noise_corr_length == 0:
        return rng.normal(0.0, spec.noise_sigma, size=(n, 2))
    # Gaussian-kernel smoothed white noise, rescaled to unit marginal variance
    width = spec.noise_corr_length / spec.spacing
    half = int(math.ceil(6 * width))
    taps = np.exp(-0.5 * (np.arange(-half, half + 1) / width) ** 2)
    taps /= math.sqrt(float(taps @ taps))
    raw = rng.normal(0.0, 1.0, size=(n + 2 * half, 2))
    out = np.column_stack([np.convolve(raw[:, k], taps, mode="valid") for k in range(2)])
    return spec.noise_sigma * out


def _planar(spec: SynthSpec, squiggle_from: float) -> np.ndarray:
    n = int(math.floor(spec.length / spec.spacing + 1e-9)) + 1
    along = np.arange(n) * spec.spacing
    lateral = np.zeros(n)
    if squiggle_from < math.inf:
        on = along >= squiggle_from
        lateral[on] = spec.amplitude * np.sin(2 * math.pi * (along[on] - squiggle_from) / spec.wavelength)
    h = math.radians(spec.heading)
    fwd = np.array([math.sin(h), math.cos(h)])      # east, north
    left = np.array([-math.cos(h), math.sin(h)])
    xy = along[:, None] * fwd + lateral[:, None] * left
    rng = np.random.default_rng(spec.seed)
    return xy + _noise(rng, n, spec)


def _to_track(xy: np.ndarray, spec: SynthSpec, track_id: str) -> Track:
    lat, lon = unproject_xy(xy[:, 0], xy[:, 1], spec.origin.lat, spec.origin.lon)
    dt = spec.spacing / SPEED_MPS
    pts = [GeoPoint(float(a), float(o), None, T0 + k * dt)
           for k, (a, o) in enumerate(zip(lat, lon))]
    return Track(track_id, pts, "synthetic")


def generate(spec: SynthSpec, track_id: Optional[str] = None) -> LabeledTrack:
    """Generate one labelled ride; identical spec gives an identical ride."""
    kind = Label(spec.kind)
    xy = _planar(spec, 0.0 if kind is Label.SQUIGGLY else math.inf)
    tid = track_id or f"{kind}-{spec.seed}"
    return LabeledTrack(_to_track(xy, spec, tid), kind)


def generate_mixed(spec: SynthSpec, squiggly_fraction: float = 0.5,
                   track_id: str = "mixed") -> Track:
    """A ride that is straight for its first part and squiggly for the last
    ``squiggly_fraction`` of its centreline."""
    if not 0 <= squiggly_fraction <= 1:
        raise SpecInvalid("squiggly_fraction must be in [0, 1]")
    start = spec.length * (1 - squiggly_fraction)
    return _to_track(_planar(spec, start), spec, track_id)


def generate_corpus(n_per_class: int, base_spec: SynthSpec, seed: int,
                    jitter_deg: float = 0.05) -> list[LabeledTrack]:
    """``n_per_class`` straight rides followed by as many squiggly ones.

    Heading, origin and noise seed of each ride are drawn from ``seed``.
    """
    if n_per_class < 1:
        raise SpecInvalid("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    corpus = []
    for kind in (Label.STRAIGHT, Label.SQUIGGLY):
        for i in range(n_per_class):
            heading = float(rng.uniform(0.0, 360.0))
            dlat, dlon = rng.uniform(-jitter_deg, jitter_deg, size=2)
            origin = GeoPoint(base_spec.origin.lat + float(dlat), base_spec.origin.lon + float(dlon))
            spec = base_spec.replace(kind=kind, heading=heading, origin=origin,
                                     seed=int(rng.integers(2**31)))
            corpus.append(generate(spec, track_id=f"{kind}-{i:03d}"))
    return corpus
