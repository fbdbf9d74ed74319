"""Comparison head: fuse surface and semantic vectors on each side and score the pair."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import nn
from .core import CandidatePair, KnowledgeBase, LinkDecision, Mention
from .errors import ShapeMismatch

if TYPE_CHECKING:
    from .model import EntityLinker


@dataclass(frozen=True)
class ScorerConfig:
    fused_dim: int = 32
    hidden: int = 64
    linear_head: bool = False
    decision_threshold: float = 0.5

    def __post_init__(self):
        # a linked decision must always score above 0.5
        if not 0.5 <= self.decision_threshold < 1.0:
            raise ValueError("decision_threshold must lie in [0.5, 1)")


class Scorer:
    """Compatibility projections for context/anchor vectors plus a two-layer head.

    ``linear_head`` swaps the relu between the head layers for the identity, in
    which case the two layers compose to a single affine map.
    """

    def __init__(self, cfg: ScorerConfig, mention_proj: nn.DenseLayer, entity_proj: nn.DenseLayer,
                 hidden: nn.DenseLayer, out: nn.DenseLayer):
        self.cfg = cfg
        self.mention_proj = mention_proj
        self.entity_proj = entity_proj
        self.hidden = hidden
        self.out = out
        if mention_proj.n_out != cfg.fused_dim or entity_proj.n_out != cfg.fused_dim:
            raise ShapeMismatch("projections must output fused_dim")
        if hidden.n_out != out.n_in or out.n_out != 1:
            raise ShapeMismatch("head layers do not chain to a single output")
        if hidden.n_in % 2:
            raise ShapeMismatch("head input must hold two equal-length embeddings")

    @classmethod
    def init(cls, cfg: ScorerConfig, surface_dim: int, context_dim: int, entity_dim: int,
             rng: np.random.Generator) -> "Scorer":
        emb = surface_dim + cfg.fused_dim
        act = "identity" if cfg.linear_head else "relu"
        return cls(
            cfg,
            nn.DenseLayer.init(rng, context_dim, cfg.fused_dim),
            nn.DenseLayer.init(rng, entity_dim, cfg.fused_dim),
            nn.DenseLayer.init(rng, 2 * emb, cfg.hidden, act),
            nn.DenseLayer.init(rng, cfg.hidden, 1),
        )

    @property
    def embedding_dim(self) -> int:
        return self.hidden.n_in // 2

    @property
    def surface_dim(self) -> int:
        return self.embedding_dim - self.cfg.fused_dim

    def parameters(self) -> list[nn.Tensor]:
        return [p for layer in (self.mention_proj, self.entity_proj, self.hidden, self.out)
                for p in layer.parameters()]

    def _side(self, proj, surface, semantic) -> nn.Tensor:
        surface = nn.as_tensor(surface)
        if surface.shape[-1] != self.surface_dim:
            raise ShapeMismatch(f"surface vector length {surface.shape[-1]} != {self.surface_dim}")
        return nn.concat([surface, proj(semantic)])

    def mention_embedding(self, surface, context) -> nn.Tensor:
        return self._side(self.mention_proj, surface, context)

    def entity_embedding(self, surface, anchor) -> nn.Tensor:
        return self._side(self.entity_proj, surface, anchor)

    def score_pair(self, m_emb, e_emb) -> nn.Tensor:
        m_emb, e_emb = nn.as_tensor(m_emb), nn.as_tensor(e_emb)
        if m_emb.shape != e_emb.shape or m_emb.shape[-1] != self.embedding_dim:
            raise ShapeMismatch(f"embeddings {m_emb.shape} / {e_emb.shape}")
        logit = self.out(self.hidden(nn.concat([m_emb, e_emb])))
        return nn.reshape(nn.sigmoid(logit), logit.shape[:-1])

    def decide(self, score: float) -> bool:
        return bool(score > self.cfg.decision_threshold)

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.cfg),
            "mention_proj": self.mention_proj.to_dict(),
            "entity_proj": self.entity_proj.to_dict(),
            "hidden": self.hidden.to_dict(),
            "out": self.out.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scorer":
        return cls(
            ScorerConfig(**d["config"]),
            *(nn.DenseLayer.from_dict(d[k]) for k in ("mention_proj", "entity_proj", "hidden", "out")),
        )


# thin functional wrappers over numpy vectors


def mention_embedding(params: Scorer, surface, context) -> np.ndarray:
    return params.mention_embedding(np.asarray(surface, float), np.asarray(context, float)).value


def entity_embedding(params: Scorer, surface, anchor) -> np.ndarray:
    return params.entity_embedding(np.asarray(surface, float), np.asarray(anchor, float)).value


def score_pair(params: Scorer, m_emb, e_emb) -> float:
    return float(params.score_pair(np.asarray(m_emb, float), np.asarray(e_emb, float)).value)


def decide(params: Scorer, score: float) -> bool:
    return params.decide(score)


def link_mention(model: "EntityLinker", m: Mention, candidates: Sequence[CandidatePair],
                 kb: KnowledgeBase, mention_index: int = 0) -> LinkDecision:
    """Score every candidate and link to the best one that clears the threshold.

    Ties at the top score go to the smallest entity id. If no candidate is
    linked the decision carries no entity.
    """
    if not candidates:
        return LinkDecision(mention_index, None, None, False)
    entities = [kb[c.entity_id] for c in candidates]
    surfaces = [c.surface or None for c in candidates]
    scores = model.score([m] * len(candidates), entities, surfaces)
    explained = tuple((c.entity_id, c.fuzzy_score, float(s)) for c, s in zip(candidates, scores))
    passing = [(float(s), c.entity_id) for c, s in zip(candidates, scores)
               if model.scorer.decide(float(s))]
    if not passing:
        return LinkDecision(mention_index, None, None, False, explained)
    best_score = max(s for s, _ in passing)
    best_id = min(eid for s, eid in passing if s == best_score)
    return LinkDecision(mention_index, best_id, best_score, True, explained)
