"""Ride file ingestion: GPX 1.1 and track CSV readers/writers, cleaning, and
ground-truth label files."""

from __future__ import annotations

import csv
import enum
import io
import xml.sax
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional
from xml.sax.saxutils import quoteattr

from .errors import (
    DuplicateId,
    GapTooLarge,
    InvalidCoordinate,
    InvalidTimestamps,
    MalformedXml,
    MissingHeader,
    NoTrackPoints,
    RowParseError,
    TooShort,
    UnknownLabel,
)
from .geo import GeoPoint, haversine_m

MIN_POINTS = 20
MAX_GAP_M = 200.0

GPX_NS = "http://www.topografix.com/GPX/1/1"


class Label(enum.IntEnum):
    STRAIGHT = 0
    SQUIGGLY = 1

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise UnknownLabel(f"unknown label {text!r} (expected squiggly or straight)") from None

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Track:
    id: str
    points: tuple[GeoPoint, ...]
    source: str = "gpx"  # gpx | csv | synthetic

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        times = [p.t for p in self.points]
        if any(t is not None for t in times):
            if any(t is None for t in times):
                raise InvalidTimestamps(f"{self.id}: timestamps present on some points only")
            for i in range(1, len(times)):
                if times[i] <= times[i - 1]:
                    raise InvalidTimestamps(
                        f"{self.id}: timestamps not strictly increasing at point {i}")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LabeledTrack:
    track: Track
    label: Label


# --------------------------------------------------------------------- GPX

def _parse_time(text: str) -> float:
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _format_time(t: float) -> str:
    dt = datetime.fromtimestamp(t, tz=timezone.utc)
    return dt.isoformat(timespec="microseconds").replace("+00:00", "Z")


class _GpxHandler(xml.sax.handler.ContentHandler):
    def __init__(self):
        super().__init__()
        self.points: list[GeoPoint] = []
        self.name: Optional[str] = None
        self._locator = None
        self._stack: list[str] = []
        self._pt: Optional[dict] = None
        self._text: list[str] = []

    def setDocumentLocator(self, locator):
        self._locator = locator

    def _line(self) -> Optional[int]:
        return self._locator.getLineNumber() if self._locator else None

    def startElementNS(self, name, qname, attrs):
        local = name[1]
        parent = self._stack[-1] if self._stack else None
        self._stack.append(local)
        self._text = []
        if local == "trkpt" and parent == "trkseg":
            vals = {n[1]: v for n, v in attrs.items()}
            line = self._line()
            try:
                lat = float(vals["lat"])
                lon = float(vals["lon"])
            except (KeyError, ValueError):
                raise InvalidCoordinate("trkpt needs numeric lat and lon attributes", line)
            self._pt = {"lat": lat, "lon": lon, "alt": None, "t": None, "line": line}

    def characters(self, content):
        self._text.append(content)

    def endElementNS(self, name, qname):
        local = self._stack.pop()
        text = "".join(self._text).strip()
        self._text = []
        if self._pt is not None:
            if local == "ele" and text:
                try:
                    self._pt["alt"] = float(text)
                except ValueError:
                    raise InvalidCoordinate(f"bad <ele> value {text!r}", self._line())
            elif local == "time" and text:
                try:
                    self._pt["t"] = _parse_time(text)
                except ValueError:
                    raise MalformedXml(f"bad <time> value {text!r}", self._line())
            elif local == "trkpt":
                pt, self._pt = self._pt, None
                try:
                    self.points.append(GeoPoint(pt["lat"], pt["lon"], pt["alt"], pt["t"]))
                except InvalidCoordinate as exc:
                    raise InvalidCoordinate(str(exc), pt["line"]) from None
        elif local == "name" and self._stack and self._stack[-1] == "trk" and self.name is None:
            self.name = text or None


def parse_gpx(data: bytes, track_id: Optional[str] = None) -> Track:
    """Read every ``trk/trkseg/trkpt`` in document order into one Track.

    Accepts the GPX 1.1 namespace or un-namespaced files. The track id is
    ``track_id`` if given, else the first ``<trk><name>``, else ``"track"``.
    """
    handler = _GpxHandler()
    parser = xml.sax.make_parser()
    parser.setFeature(xml.sax.handler.feature_namespaces, True)
    parser.setFeature(xml.sax.handler.feature_external_ges, False)
    parser.setContentHandler(handler)
    try:
        parser.parse(io.BytesIO(data))
    except xml.sax.SAXParseException as exc:
        raise MalformedXml(exc.getMessage(), exc.getLineNumber()) from None
    if not handler.points:
        raise NoTrackPoints("GPX contains no <trkpt> elements")
    return Track(track_id or handler.name or "track", handler.points, "gpx")


def write_gpx(track: Track) -> bytes:
    """Serialise a track as GPX 1.1 with full float precision."""
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(f'<gpx version="1.1" creator="trail-surface" xmlns="{GPX_NS}">\n')
    out.write(f"  <trk>\n    <name>{_xml_text(track.id)}</name>\n    <trkseg>\n")
    for p in track.points:
        out.write(f'      <trkpt lat="{p.lat!r}" lon="{p.lon!r}">')
        if p.alt is not None:
            out.write(f"<ele>{p.alt!r}</ele>")
        if p.t is not None:
            out.write(f"<time>{_format_time(p.t)}</time>")
        out.write("</trkpt>\n")
    out.write("    </trkseg>\n  </trk>\n</gpx>\n")
    return out.getvalue().encode("utf-8")


def _xml_text(s: str) -> str:
    return quoteattr(s)[1:-1]


# --------------------------------------------------------------------- CSV

TRACK_CSV_HEADER = ("lat", "lon", "alt", "t")


def parse_track_csv(data: bytes, track_id: str = "track") -> Track:
    """Read a track CSV with header ``lat,lon[,alt][,t]``. Rows are numbered
    from 1 (the first data row)."""
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise MissingHeader("empty file, expected header lat,lon,alt,t")
    cols = [h.strip().lower() for h in header]
    if "lat" not in cols or "lon" not in cols or not set(cols) <= set(TRACK_CSV_HEADER):
        raise MissingHeader(f"expected header lat,lon,alt,t; got {','.join(header)}")
    idx = {c: cols.index(c) for c in cols}

    def opt(row, name):
        if name not in idx or idx[name] >= len(row) or not row[idx[name]].strip():
            return None
        return float(row[idx[name]])

    points = []
    for n, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            points.append(GeoPoint(float(row[idx["lat"]]), float(row[idx["lon"]]),
                                   opt(row, "alt"), opt(row, "t")))
        except (ValueError, IndexError) as exc:
            raise RowParseError(str(exc) or "missing column", row=n) from None
        except InvalidCoordinate as exc:
            raise RowParseError(str(exc), row=n) from None
    if not points:
        raise NoTrackPoints("track CSV has no data rows")
    return Track(track_id, points, "csv")


def write_track_csv(track: Track) -> bytes:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACK_CSV_HEADER)
    for p in track.points:
        w.writerow([repr(p.lat), repr(p.lon),
                    "" if p.alt is None else repr(p.alt),
                    "" if p.t is None else repr(p.t)])
    return out.getvalue().encode("utf-8")


# ----------------------------------------------------------------- cleaning

def clean(track: Track) -> Track:
    """Drop consecutive duplicate fixes, then enforce the minimum length and
    the maximum gap between neighbours."""
    kept = []
    for p in track.points:
        if kept and p.lat == kept[-1].lat and p.lon == kept[-1].lon:
            continue
        kept.append(p)
    if len(kept) < MIN_POINTS:
        raise TooShort(f"{track.id}: {len(kept)} distinct points, need {MIN_POINTS}")
    for i in range(1, len(kept)):
        gap = haversine_m(kept[i - 1], kept[i])
        if gap > MAX_GAP_M:
            raise GapTooLarge(
                f"{track.id}: {gap:.1f} m gap between points {i - 1} and {i}", index=i)
    return Track(track.id, kept, track.source)


# ------------------------------------------------------------------- labels

def load_labels(data: bytes) -> dict[str, Label]:
    """Parse an ``id,label`` CSV into a mapping."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header[:2]] != ["id", "label"]:
        raise MissingHeader("label file must start with header id,label")
    labels: dict[str, Label] = {}
    for n, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 2:
            raise RowParseError("expected id,label", row=n)
        key = row[0].strip()
        if key in labels:
            raise DuplicateId(f"duplicate id {key!r} at row {n}")
        labels[key] = Label.parse(row[1])
    return labels


def write_labels(items: Iterable[tuple[str, Label]]) -> bytes:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", "label"])
    for key, label in items:
        w.writerow([key, str(label)])
    return out.getvalue().encode("utf-8")
