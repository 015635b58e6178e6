"""Shared containers for the classifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimMismatch, EmptyDataset
from ..ingest import Label


@dataclass(frozen=True)
class Prediction:
    id: str
    score: float  # higher = more squiggly
    label: Label


@dataclass
class Dataset:
    """Feature rows with 0/1 labels (1 = squiggly) and row ids."""

    X: np.ndarray
    y: np.ndarray
    ids: list[str]
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        self.y = np.asarray(self.y, dtype=int)
        self.ids = [str(i) for i in self.ids]
        if len(self.X) != len(self.y) or len(self.y) != len(self.ids):
            raise ValueError("X, y and ids must have the same length")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("features must be finite")
        if not set(np.unique(self.y).tolist()) <= {0, 1}:
            raise ValueError("labels must be 0 (straight) or 1 (squiggly)")
        if not self.feature_names:
            self.feature_names = [f"f{j}" for j in range(self.X.shape[1])]

    def __len__(self) -> int:
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def subset(self, ids: Sequence[str]) -> "Dataset":
        pos = {k: i for i, k in enumerate(self.ids)}
        rows = [pos[k] for k in ids]
        return Dataset(self.X[rows], self.y[rows], list(ids), list(self.feature_names))


def require_rows(data: Dataset) -> None:
    if len(data) == 0:
        raise EmptyDataset("dataset has no rows")


def check_dim(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != dim:
        raise DimMismatch(f"model expects {dim} features, got {x.shape[0]}")
    return x


class MinMaxScaler:
    """Per-feature affine map of the training range onto [0, 1].

    Constant columns map to 0.
    """

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        span = self.hi - self.lo
        self._span = np.where(span > 0, span, 1.0)

    @classmethod
    def fit(cls, X: np.ndarray) -> "MinMaxScaler":
        return cls(X.min(axis=0), X.max(axis=0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.lo) / self._span


class Model:
    """Common prediction surface: ``score`` per row, then a thresholded label."""

    kind: str = ""
    threshold: float = 0.5
    dim: int = 0

    def score(self, x) -> float:
        raise NotImplementedError

    def score_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if self.dim == 1 else X.reshape(1, -1)
        return np.array([self.score(row) for row in X], dtype=float)

    def predict(self, x, id: str = "") -> Prediction:
        s = self.score(x)
        return Prediction(id, s, Label.SQUIGGLY if s >= self.threshold else Label.STRAIGHT)

    def predict_many(self, X, ids: Sequence[str]) -> list[Prediction]:
        scores = self.score_many(X)
        return [Prediction(i, float(s), Label.SQUIGGLY if s >= self.threshold else Label.STRAIGHT)
                for i, s in zip(ids, scores)]
