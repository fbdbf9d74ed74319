import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlink.errors import EmptyInput, SingleClass
from entlink.metrics import (ConfusionCounts, confusion, f1_score, format_table, per_mention_accuracy, prf,
                             report, roc_auc)

from oracles import auc_pairs


def test_confusion_examples():
    assert confusion([(True, True)]) == ConfusionCounts(tp=1)
    assert confusion([(True, False), (False, True)]) == ConfusionCounts(fp=1, fn=1)
    c = confusion([(True, True), (False, False), (False, False)])
    assert c.fp == c.fn == 0
    with pytest.raises(EmptyInput):
        confusion([])


@pytest.mark.parametrize("p, r, f1", [(0.9093, 0.9458, 0.9272), (0.8854, 0.8543, 0.8696)])
def test_reported_f1_values(p, r, f1):
    assert f1_score(p, r) == pytest.approx(f1, abs=1e-4)


def test_undefined_precision_recall():
    r = prf(ConfusionCounts(tn=5))
    assert r.accuracy == 1.0
    assert r.precision is None and r.recall is None and r.f1 is None
    r = prf(ConfusionCounts(tp=0, fp=3, fn=2))
    assert r.precision == 0.0 and r.recall == 0.0 and r.f1 == 0.0
    table = format_table(report(ConfusionCounts(tn=5)))
    assert "precision  undefined" in table


def test_auc_examples():
    assert roc_auc([(0.9, True), (0.1, False)]) == 1.0
    assert roc_auc([(0.3, True), (0.3, False), (0.3, True)]) == 0.5
    assert roc_auc([(0.9, True), (0.4, False), (0.6, True)]) == 1.0
    assert roc_auc([(0.1, True), (0.9, False)]) == 0.0
    with pytest.raises(SingleClass):
        roc_auc([(0.1, True), (0.2, True)])
    with pytest.raises(EmptyInput):
        roc_auc([])


scored_lists = st.lists(
    st.tuples(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.7, 0.9, 1.0]), st.booleans()), min_size=2, max_size=40,
).filter(lambda xs: 0 < sum(a for _, a in xs) < len(xs))


@given(scored_lists)
def test_auc_matches_pair_enumeration(xs):
    assert roc_auc(xs) == pytest.approx(auc_pairs([s for s, _ in xs], [a for _, a in xs]), abs=1e-12)


@given(scored_lists, st.sampled_from(["cube", "exp", "affine", "logit"]))
def test_auc_invariant_under_increasing_transforms(xs, kind):
    f = {"cube": lambda s: s ** 3, "exp": np.exp, "affine": lambda s: 3 * s - 7,
         "logit": lambda s: np.log((s + 0.01) / (1.01 - s))}[kind]
    assert roc_auc([(float(f(s)), a) for s, a in xs]) == pytest.approx(roc_auc(xs), abs=1e-12)


@given(st.lists(st.booleans(), min_size=2, max_size=30).filter(lambda b: 0 < sum(b) < len(b)),
       st.integers(0, 2**32 - 1))
def test_auc_complement_without_ties(labels, seed):
    scores = np.random.default_rng(seed).permutation(len(labels)) / len(labels)
    xs = list(zip(scores, labels))
    flipped = [(s, not a) for s, a in xs]
    assert roc_auc(xs) + roc_auc(flipped) == pytest.approx(1.0, abs=1e-12)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=60))
def test_prf_matches_recount(decisions):
    c = confusion(decisions)
    tp = sum(p and a for p, a in decisions)
    fp = sum(p and not a for p, a in decisions)
    fn = sum(a and not p for p, a in decisions)
    tn = len(decisions) - tp - fp - fn
    assert c == ConfusionCounts(tp, fp, tn, fn)
    r = prf(c)
    assert r.accuracy == (tp + tn) / len(decisions)
    assert r.precision == (tp / (tp + fp) if tp + fp else None)
    assert r.recall == (tp / (tp + fn) if tp + fn else None)


@given(st.floats(0, 1), st.floats(0, 1))
def test_f1_between_precision_and_recall(p, r):
    f = f1_score(p, r)
    assert min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12


def test_per_mention_accuracy():
    groups = {
        0: [("a", 0.9, 1), ("b", 0.8, 0)],
        1: [("a", 0.4, 1), ("b", 0.45, 0)],  # nothing passes, but a positive exists
        2: [("c", 0.3, 0)],  # no positive, nothing passes
        3: [("z", 0.7, 1), ("y", 0.7, 0)],  # tie goes to the smallest id
    }
    assert per_mention_accuracy(groups) == 0.5


def test_report_keys():
    rep = report(ConfusionCounts(3, 1, 4, 2), auc=0.8, mention_accuracy=0.75)
    assert rep["precision"] == 0.75 and rep["recall"] == 0.6
    assert rep["auc"] == 0.8
    lines = format_table(rep).splitlines()
    assert lines[0] == "accuracy          0.7000" and lines[-1] == "pairs             10"
