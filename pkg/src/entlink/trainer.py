"""Weakly supervised pair construction, stratified splitting and end-to-end training."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import nn
from .blocking import BlockingConfig, candidates_batch
from .core import KnowledgeBase, Mention
from .errors import NoPositives, SingleClassDataset, TooSmall

if TYPE_CHECKING:
    from .model import EntityLinker

HIGH_CONFIDENCE = 0.9
LOW_CONFIDENCE = 0.8
TIERS = ("high_confidence", "low_confidence", "synthetic", "gold")


@dataclass(frozen=True)
class LabeledPair:
    mention_index: int
    entity_id: str
    label: int
    tier: str

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if self.tier not in TIERS:
            raise ValueError(f"unknown tier {self.tier!r}")

    def to_record(self) -> dict:
        return {"mention_index": self.mention_index, "entity_id": self.entity_id,
                "label": self.label, "tier": self.tier}


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 300
    lr: float = 0.05
    batch_size: int = 4
    seed: int = 42
    negative_ratio: int = 1
    margin: float = 0.2

    def __post_init__(self):
        if self.epochs < 0 or self.lr <= 0 or self.batch_size < 1 or self.margin <= 0:
            raise ValueError("epochs must be >= 0; lr, batch_size and margin positive")
        if self.negative_ratio < 1:
            raise ValueError("negative_ratio must be >= 1")


def tier_for(threshold: float) -> str:
    if threshold >= HIGH_CONFIDENCE:
        return "high_confidence"
    if threshold >= LOW_CONFIDENCE:
        return "low_confidence"
    return "synthetic"


def _sample_negatives(rng, pool: list[str], k: int) -> list[str]:
    if len(pool) <= k:
        return list(pool)
    picks = rng.choice(len(pool), size=k, replace=False)
    return [pool[i] for i in sorted(picks)]


def build_weak_dataset(ms: Sequence[Mention], kb: KnowledgeBase, tier_threshold: float, neg_ratio: int,
                       rng: np.random.Generator, blocking: BlockingConfig = BlockingConfig(),
                       tier: str | None = None) -> list[LabeledPair]:
    """Label pairs from fuzzy scores alone.

    A mention's positive is its top-scoring entity if that score is at least
    ``tier_threshold`` and no other entity ties it. Its negatives are up to
    ``neg_ratio`` other blocking candidates sampled without replacement.
    """
    tier = tier or tier_for(tier_threshold)
    out = []
    for i, cands in enumerate(candidates_batch(ms, kb, blocking)):
        if not cands or cands[0].fuzzy_score < tier_threshold:
            continue
        if len(cands) > 1 and cands[1].fuzzy_score == cands[0].fuzzy_score:
            continue
        positive = cands[0].entity_id
        out.append(LabeledPair(i, positive, 1, tier))
        pool = [c.entity_id for c in cands[1:]]
        out.extend(LabeledPair(i, eid, 0, tier) for eid in _sample_negatives(rng, pool, neg_ratio))
    if not any(p.label for p in out):
        raise NoPositives(f"no mention has a unique candidate scoring >= {tier_threshold}")
    return out


def build_gold_dataset(ms: Sequence[Mention], kb: KnowledgeBase, neg_ratio: int,
                       rng: np.random.Generator, blocking: BlockingConfig = BlockingConfig()) -> list[LabeledPair]:
    """Pairs from annotated ``gold_id``: the gold entity plus sampled blocking candidates as negatives."""
    out = []
    for i, (m, cands) in enumerate(zip(ms, candidates_batch(ms, kb, blocking))):
        if m.gold_id is None:
            continue
        if m.gold_id not in kb:
            raise KeyError(f"mention {i} has unknown gold_id {m.gold_id!r}")
        out.append(LabeledPair(i, m.gold_id, 1, "gold"))
        pool = [c.entity_id for c in cands if c.entity_id != m.gold_id]
        out.extend(LabeledPair(i, eid, 0, "gold") for eid in _sample_negatives(rng, pool, neg_ratio))
    if not out:
        raise NoPositives("no mention carries a gold_id")
    return out


def train_test_split(dataset: Sequence[LabeledPair], test_fraction: float,
                     rng: np.random.Generator) -> tuple[list[LabeledPair], list[LabeledPair]]:
    """Seeded split, stratified by label; both parts keep input order."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    n = len(dataset)
    n_test = math.floor(n * test_fraction + 0.5)
    if n_test == 0 or n_test == n:
        raise TooSmall(f"{n} items cannot be split with test_fraction={test_fraction}")
    by_label = {lab: [i for i, p in enumerate(dataset) if p.label == lab] for lab in (0, 1)}
    exact = {lab: len(idx) * test_fraction for lab, idx in by_label.items()}
    quota = {lab: math.floor(x) for lab, x in exact.items()}
    # largest remainder, ties to the smaller label
    for lab in sorted(exact, key=lambda lab: (-(exact[lab] - quota[lab]), lab)):
        if sum(quota.values()) >= n_test:
            break
        quota[lab] += 1
    test_idx = set()
    for lab, idx in by_label.items():
        perm = rng.permutation(len(idx))
        test_idx.update(idx[j] for j in perm[:quota[lab]])
    train = [p for i, p in enumerate(dataset) if i not in test_idx]
    test = [p for i, p in enumerate(dataset) if i in test_idx]
    return train, test


def pair_features(model: "EntityLinker", dataset: Sequence[LabeledPair], ms: Sequence[Mention],
                  kb: KnowledgeBase):
    feats = model.features([ms[p.mention_index] for p in dataset], [kb[p.entity_id] for p in dataset])
    labels = np.array([p.label for p in dataset], dtype=np.float64)
    return feats, labels


def train_linker(dataset: Sequence[LabeledPair], ms: Sequence[Mention], kb: KnowledgeBase,
                 model: "EntityLinker", cfg: TrainConfig,
                 rng: np.random.Generator | None = None) -> tuple["EntityLinker", list[dict]]:
    """Mini-batch SGD on binary cross-entropy over pair scores.

    Updates the surface encoder and scorer in place; the entity and context
    encoders are frozen. Returns the model and, per epoch, the full-training-set
    loss and accuracy measured after the epoch's updates.
    """
    labels_present = {p.label for p in dataset}
    if labels_present != {0, 1}:
        raise SingleClassDataset(f"dataset labels {sorted(labels_present)}; need both 0 and 1")
    rng = rng if rng is not None else nn.make_rng(cfg.seed)
    feats, labels = pair_features(model, dataset, ms, kb)
    params = model.trainable_parameters()
    n = len(dataset)
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            rows = order[start:start + cfg.batch_size]
            loss = nn.mean(nn.bce(model.forward(feats.take(rows)), labels[rows]))
            nn.backward(loss)
            nn.sgd_step(params, cfg.lr)
        scores = model.forward(feats).value
        history.append({
            "epoch": epoch,
            "loss": float(nn.bce(nn.Tensor(scores), labels).value.mean()),
            "accuracy": float(np.mean((scores > model.scorer.cfg.decision_threshold) == (labels == 1))),
        })
    return model, history
