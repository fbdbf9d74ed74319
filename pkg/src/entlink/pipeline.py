"""End-to-end stages: block, train, link and evaluate. The CLI is a thin shell over these."""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from . import nn
from .blocking import BlockingConfig, candidates_batch
from .config import PipelineConfig
from .core import CandidatePair, KnowledgeBase, LinkDecision, Mention
from .metrics import ConfusionCounts, confusion, per_mention_accuracy, report, roc_auc
from .model import EntityLinker
from .scorer import link_mention
from .semantic import BagOfEmbeddings, ContextEncoder, TripletEntityEncoder, build_triplets, train_triplet
from .trainer import (LabeledPair, build_gold_dataset, build_weak_dataset, pair_features,
                      train_linker, train_test_split)
from .vectors import WordVectors

log = logging.getLogger(__name__)


def block(mentions: Sequence[Mention], kb: KnowledgeBase, cfg: PipelineConfig) -> list[list[CandidatePair]]:
    return candidates_batch(mentions, kb, BlockingConfig(cfg.blocking_threshold))


def build_dataset(mentions, kb, cfg: PipelineConfig, rng) -> list[LabeledPair]:
    mode = cfg.labels
    if mode == "auto":
        mode = "gold" if any(m.gold_id is not None for m in mentions) else "weak"
    blocking = BlockingConfig(cfg.blocking_threshold)
    ratio = cfg.train.negative_ratio
    if mode == "gold":
        return build_gold_dataset(mentions, kb, ratio, rng, blocking)
    return build_weak_dataset(mentions, kb, cfg.weak_threshold, ratio, rng, blocking, tier=cfg.weak_tier)


@dataclass
class TrainResult:
    model: EntityLinker
    train_pairs: list[LabeledPair]
    test_pairs: list[LabeledPair]
    triplet_history: list[float]
    history: list[dict]


def train(kb: KnowledgeBase, mentions: Sequence[Mention], wv: WordVectors, cfg: PipelineConfig,
          pairs: Sequence[LabeledPair] | None = None, test_fraction: float | None = None,
          context_encoder: ContextEncoder | None = None) -> TrainResult:
    """Triplet pre-training of the entity encoder, then supervised linking.

    A single generator seeded from ``cfg.seed`` drives every random choice, in
    a fixed order, so identical inputs give identical parameters.
    """
    rng = nn.make_rng(cfg.seed)
    entity_encoder = TripletEntityEncoder.init(wv, rng, cfg.train.margin)
    triplets = build_triplets(kb, wv, rng, cfg.triplet.per_entity)
    log.info("built %d triplets", len(triplets))
    triplet_history: list[float] = []
    if triplets:
        _, triplet_history = train_triplet(entity_encoder, triplets, kb, cfg.triplet.epochs,
                                           cfg.triplet.lr, rng, cfg.triplet.batch_size)

    if pairs is None:
        pairs = build_dataset(mentions, kb, cfg, rng)
    pairs = list(pairs)
    test: list[LabeledPair] = []
    if test_fraction:
        pairs, test = train_test_split(pairs, test_fraction, rng)
    log.info("training on %d pairs (%d held out)", len(pairs), len(test))

    model = EntityLinker.init(context_encoder or BagOfEmbeddings(wv), entity_encoder, rng,
                              cfg.surface, cfg.scorer)
    _, history = train_linker(pairs, mentions, kb, model, cfg.train_config, rng)
    return TrainResult(model, pairs, test, triplet_history, history)


def link(model: EntityLinker, mentions: Sequence[Mention], kb: KnowledgeBase,
         cfg: PipelineConfig) -> list[LinkDecision]:
    cands = block(mentions, kb, cfg)
    return [link_mention(model, m, c, kb, i) for i, (m, c) in enumerate(zip(mentions, cands))]


def evaluate_scores(scored: Sequence[tuple[int, str, float, int]], threshold: float = 0.5) -> dict:
    """Metrics report from ``(mention_index, entity_id, score, label)`` rows."""
    counts: ConfusionCounts = confusion((s > threshold, lab == 1) for _, _, s, lab in scored)
    auc = roc_auc((s, lab == 1) for _, _, s, lab in scored)
    groups: dict[int, list] = defaultdict(list)
    for mi, eid, s, lab in scored:
        groups[mi].append((eid, s, lab))
    return report(counts, auc, per_mention_accuracy(groups, threshold))


def evaluate(model: EntityLinker, pairs: Sequence[LabeledPair], mentions: Sequence[Mention],
             kb: KnowledgeBase) -> dict:
    feats, labels = pair_features(model, pairs, mentions, kb)
    scores = model.forward(feats).value
    rows = [(p.mention_index, p.entity_id, float(s), p.label) for p, s in zip(pairs, scores)]
    return evaluate_scores(rows, model.scorer.cfg.decision_threshold)
