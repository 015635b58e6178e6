import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trail_surface.errors import IdMismatch, NonpositiveWeight, SingleClassTruth, TooFewPerClass
from trail_surface.evaluation import classification_report, make_split, roc_csv, roc_curve, vo2max
from trail_surface.ingest import Label
from trail_surface.ml import Prediction


def labelled(n_sq, n_st):
    return ([(f"q{i}", Label.SQUIGGLY) for i in range(n_sq)]
            + [(f"t{i}", Label.STRAIGHT) for i in range(n_st)])


def mann_whitney(truth, scores):
    """Fraction of positive/negative pairs ordered correctly, ties count half."""
    pos = [s for t, s in zip(truth, scores) if t == 1]
    neg = [s for t, s in zip(truth, scores) if t == 0]
    total = 0.0
    for p, q in itertools.product(pos, neg):
        total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


# -------------------------------------------------------------------- split

def test_split_even():
    sp = make_split(labelled(10, 10), 0.5, seed=1)
    assert sum(k.startswith("q") for k in sp.train_ids) == 5
    assert sum(k.startswith("t") for k in sp.train_ids) == 5
    assert len(sp.test_ids) == 10


def test_split_deterministic():
    assert make_split(labelled(30, 25), 0.5, 7) == make_split(labelled(30, 25), 0.5, 7)
    assert make_split(labelled(30, 25), 0.5, 7) != make_split(labelled(30, 25), 0.5, 8)


def test_split_paper_corpus_size():
    sp = make_split(labelled(58, 57), 0.55, seed=3)
    assert abs(len(sp.train_ids) - 0.55 * 115) <= 1
    assert len(sp.train_ids) in (63, 64)


def test_split_too_few():
    with pytest.raises(TooFewPerClass):
        make_split(labelled(1, 10), 0.5, 0)


@settings(max_examples=100)
@given(st.integers(2, 80), st.integers(2, 80), st.floats(0.05, 0.95), st.integers(0, 10**6))
def test_split_invariants(n_sq, n_st, ratio, seed):
    items = labelled(n_sq, n_st)
    sp = make_split(items, ratio, seed)
    train, test = set(sp.train_ids), set(sp.test_ids)
    assert not train & test
    assert train | test == {k for k, _ in items}
    assert abs(len(train) - ratio * len(items)) <= 1 + 1e-9 or min(n_sq, n_st) * min(ratio, 1 - ratio) < 0.5
    for prefix, n in (("q", n_sq), ("t", n_st)):
        k = sum(x.startswith(prefix) for x in train)
        assert abs(k - ratio * n) <= 1 or min(ratio, 1 - ratio) * n < 0.5
    if ratio != 0.5:
        mirror = make_split(items, 1 - ratio, seed)
        assert set(mirror.train_ids) == test
        assert set(mirror.test_ids) == train


# ------------------------------------------------------------------ metrics

def preds(pairs):
    return [Prediction(k, 1.0 if lab is Label.SQUIGGLY else 0.0, lab) for k, lab in pairs]


def test_report_perfect():
    truth = dict(labelled(5, 5))
    r = classification_report(truth, preds(truth.items()))
    assert (r.accuracy, r.precision, r.recall) == (1.0, 1.0, 1.0)


def test_report_all_squiggly():
    truth = dict(labelled(5, 5))
    r = classification_report(truth, preds((k, Label.SQUIGGLY) for k in truth))
    # hand-computed: tp=5 fp=5 tn=0 fn=0
    assert (r.tp, r.fp, r.tn, r.fn) == (5, 5, 0, 0)
    assert r.accuracy == 0.5
    assert r.precision == 0.25
    assert r.recall == 0.5
    assert any("straight" in f for f in r.flags)


def test_report_id_mismatch():
    truth = dict(labelled(2, 2))
    with pytest.raises(IdMismatch):
        classification_report(truth, preds([("q0", Label.SQUIGGLY)]))


@settings(max_examples=100)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_accuracy_identity(rows):
    truth = {str(i): Label(int(t)) for i, (t, _) in enumerate(rows)}
    r = classification_report(truth, preds((str(i), Label(int(p))) for i, (_, p) in enumerate(rows)))
    assert r.tp + r.fp + r.tn + r.fn == len(rows)
    assert round(r.accuracy * len(rows)) == r.tp + r.tn
    assert 0 <= r.precision <= 1 and 0 <= r.recall <= 1


# ---------------------------------------------------------------------- roc

def test_roc_perfect():
    pts, auc = roc_curve([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1])
    assert auc == 1.0
    assert pts[0] == (0.0, 0.0) and pts[-1] == (1.0, 1.0)


def test_roc_all_tied():
    pts, auc = roc_curve([1, 0, 1, 0], [0.5] * 4)
    assert pts == [(0.0, 0.0), (1.0, 1.0)]
    assert auc == 0.5


def test_roc_worked_example():
    truth, scores = [1, 0, 1, 0], [0.9, 0.8, 0.7, 0.6]
    _, auc = roc_curve(truth, scores)
    assert auc == pytest.approx(mann_whitney(truth, scores)) == pytest.approx(0.75)


def test_roc_single_class():
    with pytest.raises(SingleClassTruth):
        roc_curve([1, 1], [0.1, 0.2])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 200))
def test_auc_matches_pair_count(seed, n):
    r = np.random.default_rng(seed)
    truth = r.integers(0, 2, n)
    truth[0], truth[1] = 0, 1
    scores = np.round(r.normal(size=n), 1)  # rounding injects ties
    pts, auc = roc_curve(truth.tolist(), scores.tolist())
    assert auc == pytest.approx(mann_whitney(truth, scores), abs=1e-9)
    f = [p[0] for p in pts]
    t = [p[1] for p in pts]
    assert f == sorted(f) and t == sorted(t)
    # strictly increasing transform leaves the curve unchanged
    pts2, auc2 = roc_curve(truth.tolist(), np.exp(3 * scores).tolist())
    assert auc2 == pytest.approx(auc, abs=1e-9)
    assert np.allclose(pts, pts2, atol=1e-9)


def test_roc_csv():
    assert roc_csv([(0.0, 0.0), (1.0, 1.0)]) == b"fpr,tpr\n0.0,0.0\n1.0,1.0\n"


# ------------------------------------------------------------------- vo2max

def test_vo2max():
    assert vo2max(0, 70) == 7.0
    assert vo2max(270, 72) == pytest.approx(47.5)
    with pytest.raises(NonpositiveWeight):
        vo2max(200, 0)
    assert math.isfinite(vo2max(400, 1e-3))
