"""Train/test splitting, classification metrics, ROC/AUC and the VO2max
estimate from power and weight."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import IdMismatch, NonpositiveWeight, SingleClassTruth, TooFewPerClass
from .ingest import Label
from .ml.base import Prediction


@dataclass(frozen=True)
class Split:
    train_ids: list[str]
    test_ids: list[str]
    ratio: float
    seed: int


def make_split(ids_with_labels: Sequence[tuple[str, Label]] | Mapping[str, Label],
               ratio: float, seed: int) -> Split:
    """Stratified seeded split; ``ratio`` is the training share.

    Each class is shuffled with its own stream derived from ``seed``. The
    smaller side of the split takes the first ``round(min(r, 1-r) * n_c)``
    shuffled ids of each class, so ratios ``r`` and ``1 - r`` with the same
    seed give exactly swapped partitions.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    items = list(ids_with_labels.items()) if isinstance(ids_with_labels, Mapping) else list(ids_with_labels)
    by_class: dict[Label, list[str]] = {Label.STRAIGHT: [], Label.SQUIGGLY: []}
    for key, label in items:
        by_class[Label(label)].append(key)
    for label, keys in by_class.items():
        if len(keys) < 2:
            raise TooFewPerClass(f"need at least 2 ids labelled {label}, got {len(keys)}")
    seeds = np.random.SeedSequence(seed).spawn(len(by_class))
    small = round(min(ratio, 1.0 - ratio), 12)
    train: list[str] = []
    test: list[str] = []
    for ss, label in zip(seeds, sorted(by_class)):
        keys = by_class[label]
        order = np.random.default_rng(ss).permutation(len(keys))
        m = int(math.floor(small * len(keys) + 0.5))
        m = min(max(m, 1), len(keys) - 1)
        first = [keys[i] for i in order[:m]]
        rest = [keys[i] for i in order[m:]]
        if ratio <= 0.5:
            train += first
            test += rest
        else:
            train += rest
            test += first
    return Split(train, test, ratio, seed)


@dataclass
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    per_class: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    roc: list[tuple[float, float]] = field(default_factory=list)
    auc: float | None = None

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def confusion(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("tp", "fp", "tn", "fn"):
            d.pop(k)
        d["confusion"] = self.confusion()
        d["averaging"] = "macro"
        d["roc"] = [[f, t] for f, t in self.roc]
        return d


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def classification_report(truth: Mapping[str, Label], predictions: Sequence[Prediction] | Mapping[str, Prediction]) -> EvalReport:
    """Confusion counts (squiggly = positive) and macro-averaged
    precision/recall over the two classes.

    A class never predicted gets precision 0 and a class absent from the
    truth gets recall 0; both cases are listed in ``flags``.
    """
    preds = dict(predictions) if isinstance(predictions, Mapping) else {p.id: p for p in predictions}
    if set(preds) != set(truth) or len(preds) != len(predictions):
        missing = sorted(set(truth) - set(preds))
        extra = sorted(set(preds) - set(truth))
        raise IdMismatch(f"truth and predictions differ: missing {missing[:10]}, extra {extra[:10]}")
    tp = fp = tn = fn = 0
    for key, label in truth.items():
        pred = preds[key].label
        if pred is Label.SQUIGGLY:
            if label is Label.SQUIGGLY:
                tp += 1
            else:
                fp += 1
        else:
            if label is Label.STRAIGHT:
                tn += 1
            else:
                fn += 1
    flags = []
    for name, pred_pos, actual_pos in (("squiggly", tp + fp, tp + fn), ("straight", tn + fn, tn + fp)):
        if pred_pos == 0:
            flags.append(f"precision of {name} undefined (never predicted); counted as 0")
        if actual_pos == 0:
            flags.append(f"recall of {name} undefined (absent from truth); counted as 0")
    per_class = {
        "squiggly": {"precision": _ratio(tp, tp + fp), "recall": _ratio(tp, tp + fn)},
        "straight": {"precision": _ratio(tn, tn + fn), "recall": _ratio(tn, tn + fp)},
    }
    n = tp + fp + tn + fn
    return EvalReport(
        tp, fp, tn, fn,
        accuracy=_ratio(tp + tn, n),
        precision=(per_class["squiggly"]["precision"] + per_class["straight"]["precision"]) / 2,
        recall=(per_class["squiggly"]["recall"] + per_class["straight"]["recall"]) / 2,
        per_class=per_class,
        flags=flags,
    )


def roc_curve(truth: Sequence[int | Label], scores: Sequence[float]) -> tuple[list[tuple[float, float]], float]:
    """ROC vertices from (0, 0) to (1, 1), one per distinct score, and the
    trapezoidal area under them. Tied scores form one diagonal step."""
    y = np.asarray([int(t) for t in truth])
    s = np.asarray(scores, dtype=float)
    if len(y) != len(s):
        raise ValueError("truth and scores differ in length")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassTruth("ROC needs both classes in the truth")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last_of_block = np.append(s[1:] != s[:-1], True)
    tps = np.cumsum(y)[last_of_block]
    fps = np.cumsum(1 - y)[last_of_block]
    tpr = np.concatenate(([0], tps)) / n_pos
    fpr = np.concatenate(([0], fps)) / n_neg
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2))
    return list(zip(fpr.tolist(), tpr.tolist())), auc


def roc_csv(points: Sequence[tuple[float, float]]) -> bytes:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["fpr", "tpr"])
    for f, t in points:
        w.writerow([repr(float(f)), repr(float(t))])
    return out.getvalue().encode("utf-8")


def vo2max(power: float, weight: float) -> float:
    """Estimated VO2max in ml/kg/min from power (W) and body weight (kg)."""
    if not weight > 0:
        raise NonpositiveWeight(f"weight must be positive, got {weight}")
    if power < 0:
        raise ValueError(f"power must be non-negative, got {power}")
    return 10.8 * power / weight + 7.0
