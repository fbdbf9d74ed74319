"""Pairwise accuracy / precision / recall / F1 and rank-sum ROC AUC."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.stats import rankdata

from .errors import EmptyInput, SingleClass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


class PRF(NamedTuple):
    """Precision, recall and F1 are ``None`` when their denominator is zero."""

    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None


def confusion(decisions: Iterable[tuple[bool, bool]]) -> ConfusionCounts:
    """Count ``(predicted, actual)`` pairs."""
    tp = fp = tn = fn = 0
    n = 0
    for predicted, actual in decisions:
        n += 1
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    if n == 0:
        raise EmptyInput("no decisions to count")
    return ConfusionCounts(tp, fp, tn, fn)


def f1_score(precision: float | None, recall: float | None) -> float | None:
    if precision is None or recall is None:
        return None
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def prf(counts: ConfusionCounts) -> PRF:
    if counts.total == 0:
        raise EmptyInput("empty confusion counts")
    accuracy = (counts.tp + counts.tn) / counts.total
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else None
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else None
    return PRF(accuracy, precision, recall, f1_score(precision, recall))


def roc_auc(scored: Iterable[tuple[float, bool]]) -> float:
    """P(random positive outscores random negative), ties counting one half."""
    pairs = list(scored)
    if not pairs:
        raise EmptyInput("no scores")
    scores = np.array([s for s, _ in pairs], dtype=np.float64)
    actual = np.array([bool(a) for _, a in pairs])
    n_pos = int(actual.sum())
    n_neg = len(actual) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs at least one positive and one negative")
    ranks = rankdata(scores)  # average ranks, so ties contribute 1/2
    u = ranks[actual].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def per_mention_accuracy(groups: dict[int, list[tuple[str, float, int]]], threshold: float = 0.5) -> float:
    """Resolution accuracy: per mention, the linked argmax must equal the positive entity.

    ``groups`` maps a mention to its ``(entity_id, score, label)`` pairs. A mention
    with no positive pair is correct when nothing clears ``threshold``.
    """
    if not groups:
        raise EmptyInput("no mentions")
    correct = 0
    for pairs in groups.values():
        gold = next((eid for eid, _, lab in pairs if lab == 1), None)
        passing = [(s, eid) for eid, s, _ in pairs if s > threshold]
        if passing:
            best = max(s for s, _ in passing)
            chosen = min(eid for s, eid in passing if s == best)
        else:
            chosen = None
        correct += chosen == gold
    return correct / len(groups)


def _fmt(v) -> str:
    return "undefined" if v is None else f"{v:.4f}"


def report(counts: ConfusionCounts, auc: float | None = None,
           mention_accuracy: float | None = None) -> dict:
    r = prf(counts)
    out = {
        "tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn,
        "accuracy": r.accuracy, "precision": r.precision, "recall": r.recall, "f1": r.f1,
    }
    if auc is not None:
        out["auc"] = auc
    if mention_accuracy is not None:
        out["mention_accuracy"] = mention_accuracy
    return out


def format_table(rep: dict) -> str:
    """Aligned two-column table of a :func:`report` dict."""
    keys = [k for k in ("accuracy", "precision", "recall", "f1", "auc", "mention_accuracy") if k in rep]
    width = max(len(k) for k in keys)
    lines = [f"{k:<{width}}  {_fmt(rep[k])}" for k in keys]
    lines.append(f"{'pairs':<{width}}  {rep['tp'] + rep['fp'] + rep['tn'] + rep['fn']}")
    return "\n".join(lines)
