"""``trail-surface`` command line.

Subcommands: ingest, train, eval, color, profile, synth. Exit codes are
0 (success), 1 (usage), 2 (bad data) and 3 (internal error). Data goes to
stdout or the ``--out`` files; errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import DataError, DimMismatch, TrailSurfaceError, UsageError
from .evaluation import classification_report, make_split, roc_csv, roc_curve
from .features import Method, ride_features
from .geo import project_track
from .ingest import Label, Track, clean, load_labels, parse_gpx, parse_track_csv, write_gpx, write_labels
from .ml import load_model_with_meta, save_model, train_model
from .ml.base import Model
from .pipeline import (
    FeaturizedTrack,
    build_rows,
    feature_csv,
    feature_names,
    featurize,
    points_stats,
    quality_json,
    quality_path,
    read_feature_csv,
    to_dataset,
)
from .synth import SynthSpec, generate, generate_corpus, generate_mixed

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

COLORS = {Label.SQUIGGLY: "red", Label.STRAIGHT: "blue", None: "gray"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _FileError(DataError):
    def __init__(self, path: str, exc: Exception):
        self.path = path
        self.cause = exc
        self.line = getattr(exc, "line", None)
        super().__init__(f"{path}: {exc}")


# ------------------------------------------------------------------ helpers

def _threads() -> int:
    raw = os.environ.get("TRAIL_SURFACE_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TRAIL_SURFACE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"TRAIL_SURFACE_THREADS must be a positive integer, got {raw!r}")
    return n


def _check_inputs(paths: Sequence[str]) -> None:
    missing = [p for p in paths if not Path(p).is_file()]
    if missing:
        raise UsageError(f"input file not found: {', '.join(missing)}")


def _check_outputs(paths: Sequence[Optional[str]]) -> None:
    for p in paths:
        if p is None:
            continue
        parent = Path(p).resolve().parent
        if not parent.is_dir():
            raise UsageError(f"output directory does not exist: {parent}")


def _read_track(path: str) -> Track:
    data = Path(path).read_bytes()
    tid = Path(path).stem
    try:
        if path.lower().endswith(".csv"):
            return parse_track_csv(data, tid)
        return parse_gpx(data, tid)
    except DataError as exc:
        raise _FileError(path, exc) from None


def _featurize_path(path: str) -> tuple[Track, FeaturizedTrack]:
    track = _read_track(path)
    try:
        cleaned = clean(track)
        return cleaned, featurize(cleaned, do_clean=False)
    except DataError as exc:
        raise _FileError(path, exc) from None


def _featurize_all(paths: Sequence[str]) -> list[tuple[Track, FeaturizedTrack]]:
    """Per-file work in parallel; results keep input order."""
    workers = min(_threads(), max(1, len(paths)))
    if workers == 1:
        return [_featurize_path(p) for p in paths]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_featurize_path, p) for p in paths]
        return [f.result() for f in futures]


def _write(path: Optional[str], data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _json_bytes(doc) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n").encode("utf-8")


def _load_model(path: str) -> tuple[Model, dict]:
    try:
        return load_model_with_meta(Path(path).read_bytes())
    except DataError as exc:
        raise _FileError(path, exc) from None


def _labels(path: str) -> dict[str, Label]:
    try:
        return load_labels(Path(path).read_bytes())
    except DataError as exc:
        raise _FileError(path, exc) from None


def _table(path: str):
    try:
        return read_feature_csv(Path(path).read_bytes())
    except DataError as exc:
        raise _FileError(path, exc) from None


def _require_labels(ids, labels) -> None:
    missing = sorted(set(ids) - set(labels))
    if missing:
        raise DataError(f"no label for {len(missing)} track(s): {', '.join(missing)}")


def _pps_stats(features_path: str, track_ids) -> Optional[dict]:
    qp = Path(quality_path(features_path))
    if not qp.is_file():
        return None
    wanted = set(track_ids)
    counts = []
    for t in json.loads(qp.read_text())["tracks"]:
        if t["id"] in wanted:
            counts.extend(t["segment_points"])
    return points_stats(counts)


def _evaluate(model: Model, data, labels_by_row) -> dict:
    preds = model.predict_many(data.X, data.ids)
    truth = {i: labels_by_row[i] for i in data.ids}
    report = classification_report(truth, preds)
    doc = report.to_dict()
    if len(set(int(truth[i]) for i in data.ids)) == 2:
        points, auc = roc_curve([truth[p.id] for p in preds], [p.score for p in preds])
        doc["roc"] = [[f, t] for f, t in points]
        doc["auc"] = auc
    else:
        doc["roc"] = []
        doc["auc"] = None
        doc["flags"].append("auc undefined: only one class in the evaluated rows")
    doc["n"] = report.n
    doc["_predictions"] = preds
    return doc


def _row_labels(rows, labels) -> dict[str, Label]:
    return {rid: labels[g] for rid, g in zip(rows.ids, rows.groups)}


# ----------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    if not args.paths:
        raise UsageError("ingest: no input files given")
    _check_inputs(args.paths)
    _check_outputs([args.out])
    results = _featurize_all(args.paths)
    tracks = [ft for _, ft in results]
    _write(args.out, feature_csv(tracks))
    summary = quality_json(tracks)
    if args.out not in (None, "-"):
        Path(quality_path(args.out)).write_bytes(summary)
        sys.stdout.write(summary.decode("utf-8"))
    return EXIT_OK


def cmd_train(args) -> int:
    _check_inputs([args.features, args.labels])
    _check_outputs([args.model_out, args.report, args.roc])
    if not 0.0 < args.ratio < 1.0:
        raise UsageError(f"--ratio must lie in (0, 1), got {args.ratio}")
    table = _table(args.features)
    labels = _labels(args.labels)
    _require_labels(table.keys(), labels)
    rows = build_rows(table, args.method, args.level)
    usable = list(dict.fromkeys(rows.groups))
    split = make_split([(t, labels[t]) for t in usable], args.ratio, args.seed)
    names = feature_names(args.method, args.level)
    train = to_dataset(rows, labels, set(split.train_ids), names)
    test = to_dataset(rows, labels, set(split.test_ids), names)
    model = train_model(args.model, train, seed=args.seed)
    meta = {"method": args.method, "level": args.level, "feature_names": names,
            "split": {"ratio": args.ratio, "seed": args.seed}}
    Path(args.model_out).write_bytes(save_model(model, meta))

    doc = _evaluate(model, test, _row_labels(rows, labels))
    doc.pop("_predictions")
    doc.update({
        "model": args.model, "method": args.method, "level": args.level,
        "split": {"ratio": args.ratio, "seed": args.seed,
                  "train_ids": sorted(split.train_ids), "test_ids": sorted(split.test_ids)},
        "excluded_ids": rows.excluded,
        "points_per_segment_stats": _pps_stats(args.features, usable),
    })
    _write(args.report, _json_bytes(doc))
    if args.roc:
        Path(args.roc).write_bytes(roc_csv(doc["roc"]))
    return EXIT_OK


def cmd_eval(args) -> int:
    _check_inputs([args.model_file, args.features, args.labels])
    _check_outputs([args.report, args.roc, args.predictions])
    model, meta = _load_model(args.model_file)
    method = args.method or meta.get("method")
    level = args.level or meta.get("level")
    if method is None or level is None:
        raise UsageError("model file does not record method/level; pass --method and --level")
    table = _table(args.features)
    labels = _labels(args.labels)
    _require_labels(table.keys(), labels)
    rows = build_rows(table, method, level)
    if rows.X.shape[1] != model.dim:
        raise DimMismatch(f"model expects {model.dim} features, {level}-level {method} gives "
                          f"{rows.X.shape[1]}")
    data = to_dataset(rows, labels, None, feature_names(method, level))
    if len(data) == 0:
        raise DataError("no usable rows in the feature table")
    doc = _evaluate(model, data, _row_labels(rows, labels))
    preds = doc.pop("_predictions")
    doc.update({
        "model": model.kind, "method": method, "level": level,
        "split": meta.get("split"),
        "excluded_ids": rows.excluded,
        "points_per_segment_stats": _pps_stats(args.features, set(rows.groups)),
    })
    _write(args.report, _json_bytes(doc))
    if args.roc:
        Path(args.roc).write_bytes(roc_csv(doc["roc"]))
    if args.predictions:
        lines = ["id,score,label"] + [f"{p.id},{p.score!r},{p.label}" for p in preds]
        Path(args.predictions).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    return EXIT_OK


def _segment_model(path: str) -> tuple[Model, str]:
    model, meta = _load_model(path)
    if meta.get("level") != "segment":
        raise UsageError("a segment-level model is required (train with --level segment)")
    return model, meta["method"]


def _segment_span(s: np.ndarray, s_start: float, s_end: float) -> tuple[int, int]:
    """Index range [i, j] of fixes covering a window, widened to the nearest
    fix on each side so every segment has at least two positions."""
    i = max(0, int(np.searchsorted(s, s_start, side="right")) - 1)
    j = min(len(s) - 1, int(np.searchsorted(s, s_end, side="left")))
    return i, max(j, i + 1)


def color_features(track: Track, ft: FeaturizedTrack, model: Model, method: str) -> dict:
    """GeoJSON FeatureCollection with one coloured LineString per segment."""
    s = np.array([p.s for p in project_track(track.points)])
    features = []
    for seg, f in zip(ft.segments, ft.features):
        i, j = _segment_span(s, seg.s_start, seg.s_end)
        coords = [[p.lon, p.lat] for p in track.points[i:j + 1]]
        props = {"segment_index": seg.index, "valid": f is not None}
        if f is None:
            props.update(score=None, label=None, color=COLORS[None])
        else:
            pred = model.predict([f.scalar(method)], f"{track.id}#{seg.index:02d}")
            props.update(score=pred.score, label=str(pred.label), color=COLORS[pred.label])
        features.append({"type": "Feature",
                         "geometry": {"type": "LineString", "coordinates": coords},
                         "properties": props})
    return {"type": "FeatureCollection", "features": features}


def cmd_color(args) -> int:
    _check_inputs([args.model_file, args.gpx])
    _check_outputs([args.out])
    model, method = _segment_model(args.model_file)
    track, ft = _featurize_path(args.gpx)
    _write(args.out, _json_bytes(color_features(track, ft, model, method)))
    return EXIT_OK


def cmd_profile(args) -> int:
    if not args.paths:
        raise UsageError("profile: no ride files given")
    _check_inputs([args.model_file, *args.paths])
    _check_outputs([args.out])
    model, meta = _load_model(args.model_file)
    method, level = meta.get("method"), meta.get("level")
    if method is None or level not in ("ride", "segment"):
        raise UsageError("model file does not record method/level")
    totals = {"squiggly": 0.0, "straight": 0.0, "invalid": 0.0}
    rides = []
    for _, ft in _featurize_all(args.paths):
        per = {"squiggly": 0.0, "straight": 0.0, "invalid": 0.0}
        if level == "ride":
            label = None
            try:
                label = model.predict(ride_features(ft.track_id, ft.features)[Method(method)].vector()).label
            except DataError:
                pass
            for seg, f in zip(ft.segments, ft.features):
                key = "invalid" if f is None or label is None else str(label)
                per[key] += seg.length
        else:
            for seg, f in zip(ft.segments, ft.features):
                key = "invalid" if f is None else str(model.predict([f.scalar(method)]).label)
                per[key] += seg.length
        for k in totals:
            totals[k] += per[k]
        rides.append({"id": ft.track_id, **{f"{k}_m": v for k, v in per.items()}})
    classified = totals["squiggly"] + totals["straight"]
    doc = {
        "n_rides": len(rides),
        "squiggly": 100.0 * totals["squiggly"] / classified if classified else None,
        "straight": 100.0 * totals["straight"] / classified if classified else None,
        "distance_m": totals,
        "rides": rides,
        "model": model.kind, "method": method, "level": level,
    }
    _write(args.out, _json_bytes(doc))
    return EXIT_OK


def cmd_synth(args) -> int:
    out = Path(args.out)
    if out.exists() and not out.is_dir():
        raise UsageError(f"--out must be a directory: {out}")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    spec = SynthSpec(length=args.length, spacing=args.spacing, amplitude=args.amplitude,
                     wavelength=args.wavelength, noise_sigma=args.noise,
                     noise_corr_length=args.noise_corr, heading=args.heading, seed=args.seed)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    written = []
    if args.kind == "both":
        corpus = generate_corpus(args.n, spec, args.seed)
    elif args.kind == "mixed":
        corpus = []
        for i in range(args.n):
            t = generate_mixed(spec.replace(seed=int(rng.integers(2**31))), 0.5, f"mixed-{i:03d}")
            (out / f"{t.id}.gpx").write_bytes(write_gpx(t))
            written.append(t.id)
    else:
        kind = Label.parse(args.kind)
        corpus = [generate(spec.replace(kind=kind, heading=float(rng.uniform(0, 360)),
                                        seed=int(rng.integers(2**31))), f"{kind}-{i:03d}")
                  for i in range(args.n)]
    for lt in corpus:
        (out / f"{lt.track.id}.gpx").write_bytes(write_gpx(lt.track))
        written.append(lt.track.id)
    if corpus:
        (out / "labels.csv").write_bytes(write_labels((lt.track.id, lt.label) for lt in corpus))
    sys.stdout.write(_json_bytes({"out": str(out), "tracks": written}).decode("utf-8"))
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trail-surface", description="Classify ride surfaces from GPS tracks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="parse, clean, segment and featurise ride files")
    s.add_argument("paths", nargs="*", help="GPX or track CSV files")
    s.add_argument("--out", help="feature table CSV (default stdout)")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("train", help="split, train a classifier and report on the test part")
    s.add_argument("features")
    s.add_argument("labels")
    s.add_argument("--method", choices=[m.value for m in Method], required=True)
    s.add_argument("--level", choices=["ride", "segment"], default="ride")
    s.add_argument("--model", choices=["svm", "knn", "tree"], required=True)
    s.add_argument("--ratio", type=float, default=0.5, help="training share (default 0.5)")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--model-out", required=True)
    s.add_argument("--report", help="report JSON (default stdout)")
    s.add_argument("--roc", help="ROC points CSV")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="score a feature table with a saved model")
    s.add_argument("model_file")
    s.add_argument("features")
    s.add_argument("labels")
    s.add_argument("--method", choices=[m.value for m in Method],
                   help="override the method recorded in the model file")
    s.add_argument("--level", choices=["ride", "segment"],
                   help="override the level recorded in the model file")
    s.add_argument("--report", help="report JSON (default stdout)")
    s.add_argument("--roc", help="ROC points CSV")
    s.add_argument("--predictions", help="per-row predictions CSV")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("color", help="GeoJSON of a ride with segments coloured by prediction")
    s.add_argument("model_file")
    s.add_argument("gpx")
    s.add_argument("--out", help="GeoJSON file (default stdout)")
    s.set_defaults(func=cmd_color)

    s = sub.add_parser("profile", help="share of squiggly vs straight distance over many rides")
    s.add_argument("model_file")
    s.add_argument("paths", nargs="*")
    s.add_argument("--out", help="profile JSON (default stdout)")
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("synth", help="write a synthetic corpus of GPX rides and labels")
    s.add_argument("--kind", choices=["straight", "squiggly", "both", "mixed"], default="both")
    s.add_argument("--n", type=int, default=10, help="rides (per class for --kind both)")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--length", type=float, default=5000.0)
    s.add_argument("--spacing", type=float, default=2.0)
    s.add_argument("--amplitude", type=float, default=10.0)
    s.add_argument("--wavelength", type=float, default=50.0)
    s.add_argument("--noise", type=float, default=0.0, help="GPS error std, m")
    s.add_argument("--noise-corr", type=float, default=0.0,
                   help="smoothing length of the GPS error, m (0 = independent per fix)")
    s.add_argument("--heading", type=float, default=0.0)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_synth)
    return p


def _report_error(exc: BaseException, kind: str) -> None:
    doc = {"error": type(exc).__name__, "kind": kind, "message": str(exc)}
    if isinstance(exc, _FileError):
        doc["error"] = type(exc.cause).__name__
        doc["file"] = exc.path
        if exc.line is not None:
            doc["line"] = exc.line
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _report_error(exc, "usage")
        return EXIT_USAGE
    except DataError as exc:
        _report_error(exc, "data")
        return EXIT_DATA
    except TrailSurfaceError as exc:
        _report_error(exc, "internal")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        _report_error(exc, "internal")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
