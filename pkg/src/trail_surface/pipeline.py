"""Glue between the stages: track -> segments -> features, the feature table
CSV, and classifier datasets at ride or segment level."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DataError, TooFewValidSegments
from .features import STAT_NAMES, Method, SegmentFeatures, ride_features, segment_features
from .geo import project_track
from .ingest import Label, Track, clean
from .ml.base import Dataset
from .segmentation import N_SEGMENTS, Segment, segment_track

FEATURE_CSV_HEADER = ("track_id", "segment_index", "m1_count", "m1_freq", "m2_rmse",
                      "m3_crossings", "valid")

LEVELS = ("ride", "segment")


@dataclass(frozen=True)
class FeaturizedTrack:
    track_id: str
    segments: list[Segment]
    features: list[Optional[SegmentFeatures]]  # None where the segment is invalid

    @property
    def n_valid(self) -> int:
        return sum(f is not None for f in self.features)

    def points_per_segment(self) -> list[int]:
        return [len(s.points) for s in self.segments]

    def quality(self) -> dict:
        pts = self.points_per_segment()
        return {
            "id": self.track_id,
            "n_valid_segments": self.n_valid,
            "n_invalid_segments": len(self.segments) - self.n_valid,
            "points_per_segment": points_stats(pts),
            "segment_points": pts,
        }


def featurize(track: Track, do_clean: bool = True, strict_u: bool = False) -> FeaturizedTrack:
    if do_clean:
        track = clean(track)
    segments = segment_track(project_track(track.points))
    feats = [segment_features(s, strict_u=strict_u) for s in segments]
    return FeaturizedTrack(track.id, segments, feats)


def points_stats(counts: Sequence[int]) -> Optional[dict]:
    if not counts:
        return None
    arr = np.asarray(counts, dtype=float)
    return {"min": int(arr.min()), "mean": float(arr.mean()),
            "median": float(np.median(arr)), "max": int(arr.max())}


# ------------------------------------------------------------ feature table

def feature_csv(tracks: Sequence[FeaturizedTrack]) -> bytes:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FEATURE_CSV_HEADER)
    for ft in tracks:
        for seg, f in zip(ft.segments, ft.features):
            if f is None:
                w.writerow([ft.track_id, seg.index, "", "", "", "", 0])
            else:
                w.writerow([ft.track_id, seg.index, f.m1_count, repr(f.m1_slope_change_freq),
                            repr(f.m2_fit_rmse), f.m3_zero_crossings, 1])
    return out.getvalue().encode("utf-8")


def read_feature_csv(data: bytes) -> dict[str, list[Optional[SegmentFeatures]]]:
    """Feature rows grouped by track, in file order; invalid rows are None."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != FEATURE_CSV_HEADER:
        raise DataError("feature table must start with header " + ",".join(FEATURE_CSV_HEADER))
    out: dict[str, list[Optional[SegmentFeatures]]] = {}
    for n, row in enumerate(reader, start=1):
        if not row:
            continue
        try:
            tid, idx, valid = row[0], int(row[1]), row[6].strip() in ("1", "true", "True")
            feat = None
            if valid:
                feat = SegmentFeatures(idx, int(row[2]), float(row[3]), float(row[4]), int(row[5]), 0)
        except (IndexError, ValueError) as exc:
            raise DataError(f"feature table row {n}: {exc}") from None
        out.setdefault(tid, []).append(feat)
    return out


def quality_path(features_path: str) -> str:
    """Side-car file written next to a feature table by ``ingest``."""
    stem = features_path[:-4] if features_path.endswith(".csv") else features_path
    return stem + ".quality.json"


def quality_json(tracks: Sequence[FeaturizedTrack]) -> bytes:
    doc = {"n_segments_per_track": N_SEGMENTS, "tracks": [t.quality() for t in tracks]}
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


# ----------------------------------------------------------------- datasets

def feature_names(method: Method | str, level: str) -> list[str]:
    method = Method(method)
    if level == "ride":
        return [f"{method.value}_{s}" for s in STAT_NAMES]
    return [{"m1": "m1_freq", "m2": "m2_rmse", "m3": "m3_crossings"}[method.value]]


@dataclass
class TableRows:
    """Feature vectors for one (method, level) view of a feature table."""

    ids: list[str]          # row ids
    groups: list[str]       # track id of each row
    X: np.ndarray
    excluded: list[str]     # tracks dropped for lack of valid segments


def build_rows(table: Mapping[str, Sequence[Optional[SegmentFeatures]]],
               method: Method | str, level: str) -> TableRows:
    method = Method(method)
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    ids, groups, X, excluded = [], [], [], []
    for tid, feats in table.items():
        if level == "ride":
            try:
                rf = ride_features(tid, feats)[method]
            except TooFewValidSegments:
                excluded.append(tid)
                continue
            ids.append(tid)
            groups.append(tid)
            X.append(rf.vector())
        else:
            valid = [f for f in feats if f is not None]
            if not valid:
                excluded.append(tid)
            for f in valid:
                ids.append(f"{tid}#{f.index:02d}")
                groups.append(tid)
                X.append([f.scalar(method)])
    dim = 5 if level == "ride" else 1
    return TableRows(ids, groups, np.asarray(X, dtype=float).reshape(-1, dim), excluded)


def to_dataset(rows: TableRows, labels: Mapping[str, Label], groups: Optional[set[str]] = None,
               names: Sequence[str] = ()) -> Dataset:
    keep = [i for i, g in enumerate(rows.groups) if groups is None or g in groups]
    return Dataset(rows.X[keep], [int(labels[rows.groups[i]]) for i in keep],
                   [rows.ids[i] for i in keep], list(names))
