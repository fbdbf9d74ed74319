"""The full mention/entity scoring model: surface encoder, semantic encoders and scorer."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import nn
from .core import Entity, Mention
from .scorer import Scorer, ScorerConfig
from .semantic import ContextEncoder, TripletEntityEncoder
from .similarity import fuzzy_score
from .surface import SurfaceConfig, SurfaceEncoder


def best_surface(mention_text: str, e: Entity) -> str:
    """The entity name or alias with the highest fuzzy score against the mention."""
    surfaces = e.surfaces
    if len(surfaces) == 1:
        return surfaces[0]
    scores = [fuzzy_score(mention_text, s).average for s in surfaces]
    return surfaces[int(np.argmax(scores))]


@dataclass
class PairFeatures:
    """Inputs for a batch of (mention, entity) pairs; context and anchor are frozen vectors."""

    m_idx: np.ndarray
    m_mask: np.ndarray
    e_idx: np.ndarray
    e_mask: np.ndarray
    context: np.ndarray
    anchor: np.ndarray

    def __len__(self) -> int:
        return self.m_idx.shape[0]

    def take(self, rows) -> "PairFeatures":
        return PairFeatures(*(getattr(self, f)[rows] for f in
                              ("m_idx", "m_mask", "e_idx", "e_mask", "context", "anchor")))


class EntityLinker:
    def __init__(self, surface: SurfaceEncoder, context_encoder: ContextEncoder,
                 entity_encoder: TripletEntityEncoder, scorer: Scorer):
        self.surface = surface
        self.context_encoder = context_encoder
        self.entity_encoder = entity_encoder
        self.scorer = scorer

    @classmethod
    def init(cls, context_encoder: ContextEncoder, entity_encoder: TripletEntityEncoder,
             rng: np.random.Generator, surface_cfg: SurfaceConfig = SurfaceConfig(),
             scorer_cfg: ScorerConfig = ScorerConfig()) -> "EntityLinker":
        surface = SurfaceEncoder.init(surface_cfg, rng)
        scorer = Scorer.init(scorer_cfg, surface_cfg.surface_dim, context_encoder.dim,
                             entity_encoder.dim, rng)
        return cls(surface, context_encoder, entity_encoder, scorer)

    def trainable_parameters(self) -> list[nn.Tensor]:
        """Parameters updated by supervised linking (the entity encoder is pre-trained)."""
        return self.surface.parameters() + self.scorer.parameters()

    def features(self, mentions: Sequence[Mention], entities: Sequence[Entity],
                 surfaces: Sequence[str | None] | None = None) -> PairFeatures:
        if surfaces is None:
            surfaces = [None] * len(entities)
        e_names = [s or best_surface(m.text, e) for m, e, s in zip(mentions, entities, surfaces)]
        m_idx, m_mask = self.surface.index_names([m.text for m in mentions])
        e_idx, e_mask = self.surface.index_names(e_names)

        ctx_cache: dict[Mention, np.ndarray] = {}
        anchor_cache: dict[str, np.ndarray] = {}
        for m in mentions:
            if m not in ctx_cache:
                ctx_cache[m] = self.context_encoder.encode(m)
        for e in entities:
            if e.id not in anchor_cache:
                anchor_cache[e.id] = self.entity_encoder.encode(e)[0]
        context = np.stack([ctx_cache[m] for m in mentions]) if mentions else np.zeros((0, self.context_encoder.dim))
        anchor = np.stack([anchor_cache[e.id] for e in entities]) if entities else np.zeros((0, self.entity_encoder.dim))
        return PairFeatures(m_idx, m_mask, e_idx, e_mask, context, anchor)

    def forward(self, f: PairFeatures) -> nn.Tensor:
        m_surface = self.surface.forward(f.m_idx, f.m_mask)
        e_surface = self.surface.forward(f.e_idx, f.e_mask)
        m_emb = self.scorer.mention_embedding(m_surface, f.context)
        e_emb = self.scorer.entity_embedding(e_surface, f.anchor)
        return self.scorer.score_pair(m_emb, e_emb)

    def score(self, mentions: Sequence[Mention], entities: Sequence[Entity],
              surfaces: Sequence[str | None] | None = None) -> np.ndarray:
        if not mentions:
            return np.zeros(0)
        return self.forward(self.features(mentions, entities, surfaces)).value
