"""Exception hierarchy.

Every error raised on bad input derives from ``DataError`` so the CLI can map
it to exit code 2; ``UsageError`` maps to exit code 1.
"""

from __future__ import annotations


class TrailSurfaceError(Exception):
    """Base class for all package errors."""


class UsageError(TrailSurfaceError):
    pass


class DataError(TrailSurfaceError):
    pass


# geo_core

class FewerThanTwoPoints(DataError):
    pass


class DegenerateChord(DataError):
    pass


# track_ingest

class InvalidCoordinate(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidTimestamps(DataError):
    pass


class MalformedXml(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoTrackPoints(DataError):
    pass


class MissingHeader(DataError):
    pass


class RowParseError(DataError):
    def __init__(self, message: str, row: int):
        self.row = row
        super().__init__(f"row {row}: {message}")


class TooShort(DataError):
    pass


class GapTooLarge(DataError):
    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(message)


class UnknownLabel(DataError):
    pass


class DuplicateId(DataError):
    pass


# segmentation / features

class ZeroLengthTrack(DataError):
    pass


class InvalidSegment(DataError):
    pass


class SingularFit(DataError):
    pass


class NonMonotonicU(DataError):
    pass


class TooFewValidSegments(DataError):
    pass


# ml

class EmptyDataset(DataError):
    pass


class BadK(DataError):
    pass


class SingleClass(DataError):
    pass


class DimMismatch(DataError):
    pass


class CorruptModel(DataError):
    pass


# eval

class TooFewPerClass(DataError):
    pass


class IdMismatch(DataError):
    pass


class SingleClassTruth(DataError):
    pass


class NonpositiveWeight(DataError):
    pass


# synth

class SpecInvalid(DataError):
    pass
