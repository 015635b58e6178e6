"""Model file format.

A model file is UTF-8 JSON::

    {"magic": "TSURF", "version": 1, "variant": "knn" | "tree" | "svm",
     "params": {...}, "meta": {...}}

``params`` per variant:

* ``knn``: ``k``, ``rows`` (scaled training rows), ``labels`` (0/1),
  ``scale_lo``, ``scale_hi``
* ``tree``: ``dim``, ``feature``, ``threshold``, ``left``, ``right``,
  ``value`` (flat node arrays, ``feature == -1`` marks a leaf)
* ``svm``: ``weights``, ``bias``, ``scale_lo``, ``scale_hi``

Floats are written with Python's shortest round-trip repr, so a loaded
model reproduces the original's predictions bit for bit. ``meta`` is free
form (the CLI records method, level and feature names there).
"""

from __future__ import annotations

import json
from typing import Any, Optional

import numpy as np

from ..errors import CorruptModel
from .base import MinMaxScaler, Model
from .knn import KNN
from .svm import LinearSVM
from .tree import DecisionTree

MAGIC = "TSURF"
FORMAT_VERSION = 1


def _floats(a) -> list[float]:
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def model_params(model: Model) -> dict[str, Any]:
    if isinstance(model, KNN):
        return {"k": model.k, "rows": [_floats(r) for r in model.Z],
                "labels": [int(v) for v in model.y],
                "scale_lo": _floats(model.scaler.lo), "scale_hi": _floats(model.scaler.hi)}
    if isinstance(model, DecisionTree):
        return {"dim": model.dim, "feature": model.feature, "threshold": model.split,
                "left": model.left, "right": model.right, "value": model.value}
    if isinstance(model, LinearSVM):
        return {"weights": _floats(model.weights), "bias": model.bias,
                "scale_lo": _floats(model.scaler.lo), "scale_hi": _floats(model.scaler.hi)}
    raise TypeError(f"cannot serialise {type(model).__name__}")


def save_model(model: Model, meta: Optional[dict] = None) -> bytes:
    doc = {"magic": MAGIC, "version": FORMAT_VERSION, "variant": model.kind,
           "params": model_params(model), "meta": meta or {}}
    return (json.dumps(doc, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")


def _build(variant: str, p: dict) -> Model:
    if variant == "knn":
        rows = np.array(p["rows"], dtype=float)
        return KNN(p["k"], rows.reshape(len(p["labels"]), -1), np.array(p["labels"], dtype=int),
                   MinMaxScaler(p["scale_lo"], p["scale_hi"]))
    if variant == "tree":
        return DecisionTree(p["feature"], p["threshold"], p["left"], p["right"], p["value"], p["dim"])
    if variant == "svm":
        return LinearSVM(p["weights"], p["bias"], MinMaxScaler(p["scale_lo"], p["scale_hi"]))
    raise CorruptModel(f"unknown model variant {variant!r}")


def _check(model: Model) -> None:
    if isinstance(model, KNN):
        if model.k < 1 or model.k % 2 == 0 or model.k > len(model.y):
            raise CorruptModel("knn: bad k")
    elif isinstance(model, DecisionTree):
        n = model.n_nodes
        sizes = {len(model.split), len(model.left), len(model.right), len(model.value)}
        if n == 0 or sizes != {n}:
            raise CorruptModel("tree: node arrays disagree in length")
        for i in range(n):
            if model.feature[i] != -1:
                if not (i < model.left[i] < n and i < model.right[i] < n):
                    raise CorruptModel(f"tree: node {i} has a missing child")
                if not 0 <= model.feature[i] < model.dim:
                    raise CorruptModel(f"tree: node {i} splits on a missing feature")
            if not 0.0 <= model.value[i] <= 1.0:
                raise CorruptModel(f"tree: node {i} leaf fraction outside [0, 1]")
    elif isinstance(model, LinearSVM):
        if not np.all(np.isfinite(model.weights)) or not np.isfinite(model.bias):
            raise CorruptModel("svm: non-finite parameters")


def load_model_with_meta(data: bytes) -> tuple[Model, dict]:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"not a model file ({exc})") from None
    if not isinstance(doc, dict) or doc.get("magic") != MAGIC:
        raise CorruptModel("bad magic, not a TSURF model file")
    if doc.get("version") != FORMAT_VERSION:
        raise CorruptModel(f"unsupported model format version {doc.get('version')!r} "
                           f"(this build reads version {FORMAT_VERSION})")
    try:
        model = _build(doc["variant"], doc["params"])
    except CorruptModel:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed model parameters ({exc})") from None
    _check(model)
    return model, doc.get("meta") or {}


def load_model(data: bytes) -> Model:
    return load_model_with_meta(data)[0]
