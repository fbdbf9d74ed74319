"""
Evaluation metrics
==================

Pairwise accuracy, precision, recall, F1 and rank-sum AUC, plus the
per-mention resolution accuracy.
"""

from entlink.metrics import ConfusionCounts, f1_score, format_table, prf, report, roc_auc
from entlink.pipeline import evaluate_scores

# F1 is the harmonic mean of precision and recall.
print(round(f1_score(0.9093, 0.9458), 4), round(f1_score(0.8854, 0.8543), 4))

# Undefined precision or recall stays undefined rather than becoming zero.
print(prf(ConfusionCounts(tn=5)))

# AUC is the chance that a random positive outscores a random negative.
scored = [(0.9, True), (0.4, False), (0.6, True), (0.6, False)]
print("auc", roc_auc(scored))
print("auc after squaring", roc_auc([(s ** 2, y) for s, y in scored]))

rows = [(0, "a", 0.92, 1), (0, "b", 0.40, 0), (1, "c", 0.55, 0), (1, "d", 0.81, 1), (2, "e", 0.30, 1)]
print(format_table(evaluate_scores(rows)))
print(format_table(report(ConfusionCounts(tp=8, fp=1, tn=9, fn=2), auc=0.93)))
