"""Fuzzy-match blocking: keep only the entities whose best name/alias score clears a threshold."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CandidatePair, KnowledgeBase, Mention
from .similarity import encode_strings, score_matrix

# mentions per compiled call; bounds the (mentions x entities) score buffer
CHUNK = 256


@dataclass(frozen=True)
class BlockingConfig:
    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


class _KBIndex:
    """Every surface form of a KB packed once for the kernels."""

    def __init__(self, kb: KnowledgeBase):
        surfaces, owner = [], []
        for pos, e in enumerate(kb):
            for s in e.surfaces:
                surfaces.append(s)
                owner.append(pos)
        self.surfaces = encode_strings(surfaces)
        self.owner = np.asarray(owner, dtype=np.int64)
        self.ids = kb.ids
        # rank of each entity id in lexicographic order, for tie-breaks
        order = sorted(range(len(self.ids)), key=self.ids.__getitem__)
        self.id_rank = np.empty(len(order), dtype=np.int64)
        self.id_rank[order] = np.arange(len(order))


def _index(kb: KnowledgeBase) -> _KBIndex:
    return kb.cached("blocking-index", lambda: _KBIndex(kb))


def _emit(row, surf_row, index: _KBIndex, mention_index: int, threshold: float):
    keep = np.flatnonzero(row >= threshold)
    order = np.lexsort((index.id_rank[keep], -row[keep]))
    strings = index.surfaces.strings
    return [
        CandidatePair(mention_index, index.ids[k], float(row[k]), strings[surf_row[k]])
        for k in keep[order]
    ]


def _score(texts: Sequence[str], index: _KBIndex):
    return score_matrix(encode_strings(texts), index.surfaces, index.owner, len(index.ids))


def candidates(
    m: Mention, kb: KnowledgeBase, cfg: BlockingConfig = BlockingConfig(), mention_index: int = 0
) -> list[CandidatePair]:
    """Candidates for one mention, sorted by score descending then entity id."""
    index = _index(kb)
    scores, surf = _score([m.text], index)
    return _emit(scores[0], surf[0], index, mention_index, cfg.threshold)


def candidates_batch(
    ms: Sequence[Mention], kb: KnowledgeBase, cfg: BlockingConfig = BlockingConfig()
) -> list[list[CandidatePair]]:
    """``[candidates(ms[i], kb, cfg, i) for i in range(len(ms))]``, computed in parallel.

    Each mention's row is filled independently, so the result does not depend on
    the number of worker threads.
    """
    if not ms:
        return []
    index = _index(kb)
    out = []
    for start in range(0, len(ms), CHUNK):
        chunk = ms[start:start + CHUNK]
        scores, surf = _score([m.text for m in chunk], index)
        for i in range(len(chunk)):
            out.append(_emit(scores[i], surf[i], index, start + i, cfg.threshold))
    return out
