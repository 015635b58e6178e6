"""Linear soft-margin SVM trained by Pegasos-style stochastic subgradient
descent on min-max scaled features."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import SingleClass
from .base import Dataset, MinMaxScaler, Model, check_dim, require_rows

DEFAULT_EPOCHS = 2000
MIN_EPOCHS = 20
STEP_BUDGET = 2_000_000


class LinearSVM(Model):
    kind = "svm"
    threshold = 0.0

    def __init__(self, weights, bias: float, scaler: MinMaxScaler):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = float(bias)
        self.scaler = scaler
        self.dim = len(self.weights)

    def score(self, x) -> float:
        z = self.scaler.transform(check_dim(x, self.dim))
        return float(z @ self.weights + self.bias)


def objective(w: np.ndarray, b: float, Z: np.ndarray, y_pm: np.ndarray, C: float) -> float:
    """``0.5*|w|^2 + C*sum(hinge)`` on already-scaled features, labels in {-1, +1}."""
    margins = y_pm * (Z @ w + b)
    return 0.5 * float(w @ w) + C * float(np.maximum(0.0, 1.0 - margins).sum())


def optimal_bias(margins: np.ndarray, y_pm: np.ndarray) -> float:
    """Exact minimiser over ``b`` of ``sum(max(0, 1 - y*(m + b)))``.

    The sum is convex and piecewise linear with a kink at ``y_i - m_i`` for
    each row; the minimum sits where the slope first turns non-negative.
    When the minimum is a flat stretch the midpoint of that stretch is used.
    """
    kinks, inv = np.unique(y_pm - margins, return_inverse=True)
    pos = np.bincount(inv, weights=(y_pm > 0).astype(float), minlength=len(kinks))
    neg = np.bincount(inv, weights=(y_pm < 0).astype(float), minlength=len(kinks))
    # slope just to the right of kinks[k]
    slope = np.cumsum(neg) - (pos.sum() - np.cumsum(pos))
    k = int(np.argmax(slope >= 0))
    if slope[k] == 0 and k + 1 < len(kinks):
        return float(0.5 * (kinks[k] + kinks[k + 1]))
    return float(kinks[k])


def default_epochs(n: int) -> int:
    """Epochs used when none are given: ``DEFAULT_EPOCHS``, cut back so one
    fit takes at most ``STEP_BUDGET`` stochastic steps on large tables."""
    return max(MIN_EPOCHS, min(DEFAULT_EPOCHS, STEP_BUDGET // max(n, 1)))


def svm_train(data: Dataset, C: float = 1.0, epochs: Optional[int] = None,
              seed: int = 0) -> LinearSVM:
    """Minimise ``0.5*|w|^2 + C*sum(max(0, 1 - y*(w.x + b)))``.

    ``w`` follows Pegasos with ``lambda = 1 / (C*n)``: one pass per epoch in
    a seeded shuffled order, step ``1 / (lambda*t)``. With that step the
    iterate has the closed form ``w_t = (C*n/t) * v_t`` where ``v_t`` sums
    ``y_i*x_i`` over the margin violations seen so far, which is what the
    loop tracks. The unregularised bias is set exactly for the current ``w``
    at the end of every epoch, and the epoch-end iterate with the lowest
    objective is returned.
    """
    require_rows(data)
    if len(np.unique(data.y)) < 2:
        raise SingleClass("SVM training needs both classes")
    n, dim = data.X.shape
    if epochs is None:
        epochs = default_epochs(n)
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    scaler = MinMaxScaler.fit(data.X)
    Z = scaler.transform(data.X)
    y_pm = np.where(data.y == 1, 1.0, -1.0)
    cn = C * n
    rng = np.random.default_rng(seed)

    b = optimal_bias(np.zeros(n), y_pm)
    best = (objective(np.zeros(dim), b, Z, y_pm, C), np.zeros(dim), b)
    rows = Z.tolist()
    ys = y_pm.tolist()
    v = [0.0] * dim
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n).tolist():
            z = rows[i]
            yi = ys[i]
            margin = cn / t * sum(a * c for a, c in zip(v, z)) if t else 0.0
            t += 1
            if yi * (margin + b) < 1.0:
                for k in range(dim):
                    v[k] += yi * z[k]
        w = (cn / t) * np.asarray(v)
        b = optimal_bias(Z @ w, y_pm)
        j = objective(w, b, Z, y_pm, C)
        if j < best[0]:
            best = (j, w, b)
    return LinearSVM(best[1], best[2], scaler)
