"""k-nearest-neighbour classifier on min-max scaled features."""

from __future__ import annotations

import numpy as np

from ..errors import BadK
from .base import Dataset, MinMaxScaler, Model, check_dim, require_rows


class KNN(Model):
    kind = "knn"
    threshold = 0.5

    def __init__(self, k: int, Z: np.ndarray, y: np.ndarray, scaler: MinMaxScaler):
        self.k = int(k)
        self.Z = np.asarray(Z, dtype=float)
        self.y = np.asarray(y, dtype=int)
        self.scaler = scaler
        self.dim = self.Z.shape[1]

    def neighbours(self, x) -> np.ndarray:
        """Row indices of the k nearest stored rows; equal distances keep
        insertion order."""
        z = self.scaler.transform(check_dim(x, self.dim))
        d2 = ((self.Z - z) ** 2).sum(axis=1)
        return np.argsort(d2, kind="stable")[: self.k]

    def score(self, x) -> float:
        return float(self.y[self.neighbours(x)].sum()) / self.k


def knn_train(data: Dataset, k: int = 3) -> KNN:
    require_rows(data)
    if k < 1 or k % 2 == 0:
        raise BadK(f"k must be a positive odd number, got {k}")
    if k > len(data):
        raise BadK(f"k={k} exceeds the {len(data)} training rows")
    scaler = MinMaxScaler.fit(data.X)
    return KNN(k, scaler.transform(data.X), data.y.copy(), scaler)
