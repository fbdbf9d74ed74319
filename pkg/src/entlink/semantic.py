"""Semantic vectors: mention-context encoders and the triplet-trained entity encoder."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from . import nn
from .core import Entity, KnowledgeBase, Mention, normalize, tokenize
from .errors import BadHeader, DimMismatch, MissingVector, NoEligibleEntities, NonFiniteValue
from .vectors import WordVectors

MAX_REDRAWS = 100


class ContextEncoder(Protocol):
    dim: int

    def encode_context(self, text: str) -> tuple[np.ndarray, bool]: ...

    def encode(self, mention: Mention) -> np.ndarray: ...


class BagOfEmbeddings:
    """Mean of the word vectors found in the context text."""

    kind = "bag-of-embeddings"

    def __init__(self, wv: WordVectors):
        self.wv = wv

    @property
    def dim(self) -> int:
        return self.wv.dim

    def encode_context(self, text: str) -> tuple[np.ndarray, bool]:
        """Return ``(vector, has_context)``; empty or all-OOV text gives zeros and False."""
        tokens = [t for t in tokenize(text) if t in self.wv]
        if not tokens:
            return np.zeros(self.dim), False
        return self.wv.mean_pool(tokens), True

    def encode(self, mention: Mention) -> np.ndarray:
        return self.encode_context(mention.context)[0]


class PrecomputedVectors:
    """Vectors produced outside this package, keyed by mention (``doc_id#text``) or any string.

    A missing key is an error: these vectors are explicit inputs, so silently
    substituting zeros would hide a broken export.
    """

    kind = "precomputed"

    def __init__(self, table: dict[str, np.ndarray], dim: int):
        for key, v in table.items():
            if np.shape(v) != (dim,):
                raise DimMismatch(key, dim, np.size(v))
        self.table = {k: np.asarray(v, dtype=np.float64) for k, v in table.items()}
        self.dim = dim

    def lookup(self, key: str) -> np.ndarray:
        try:
            return self.table[key].copy()
        except KeyError:
            raise MissingVector(key) from None

    def encode_context(self, text: str) -> tuple[np.ndarray, bool]:
        return self.lookup(text), True

    def encode(self, mention: Mention) -> np.ndarray:
        return self.lookup(mention.key)


def load_precomputed(source: Iterable[str]) -> PrecomputedVectors:
    """Parse ``count dim`` then ``key<TAB>v1 ... v_dim`` lines."""
    lines = iter(source)
    header = next(lines, "")
    try:
        count, dim = (int(p) for p in header.split())
    except ValueError:
        raise BadHeader(f"expected 'count dim', got {header.strip()!r}") from None
    table: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        key, sep, rest = line.rstrip("\n").partition("\t")
        if not sep:
            raise BadHeader(f"line {lineno}: missing tab after key")
        values = rest.split()
        if len(values) != dim:
            raise DimMismatch(lineno, dim, len(values))
        vec = np.array([float(v) for v in values])
        if not np.all(np.isfinite(vec)):
            raise NonFiniteValue(lineno)
        table[key] = vec
    if len(table) != count:
        raise BadHeader(f"header declares {count} vectors, found {len(table)}")
    return PrecomputedVectors(table, dim)


def read_precomputed(path) -> PrecomputedVectors:
    with open(path, encoding="utf-8") as fh:
        return load_precomputed(fh)


def encode_context(enc: ContextEncoder, text: str) -> tuple[np.ndarray, bool]:
    return enc.encode_context(normalize(text))


# ---------------------------------------------------------------------------
# triplet-trained entity encoder


@dataclass(frozen=True)
class TripletExample:
    entity_id: str
    positive_word: str
    negative_word: str


class TripletEntityEncoder:
    """Anchor vector of an entity: a dense map of its mean-pooled description words.

    The anchor lives in word-vector space so it can be compared with the
    positive and negative words during triplet training.
    """

    def __init__(self, wv: WordVectors, desc_proj: nn.DenseLayer, margin: float = 0.2):
        if desc_proj.n_in != wv.dim or desc_proj.n_out != wv.dim:
            raise ValueError("desc_proj must map word-vector space onto itself")
        self.wv = wv
        self.desc_proj = desc_proj
        self.margin = margin

    @classmethod
    def init(cls, wv: WordVectors, rng: np.random.Generator, margin: float = 0.2):
        return cls(wv, nn.DenseLayer.init(rng, wv.dim, wv.dim), margin)

    @property
    def dim(self) -> int:
        return self.wv.dim

    def parameters(self) -> list[nn.Tensor]:
        return self.desc_proj.parameters()

    def pooled(self, e: Entity) -> tuple[np.ndarray, bool]:
        tokens = [t for t in tokenize(e.description) if t in self.wv]
        if not tokens:
            return np.zeros(self.dim), False
        return self.wv.mean_pool(tokens), True

    def encode(self, e: Entity) -> tuple[np.ndarray, bool]:
        """``(anchor, has_description)``; no usable description gives the zero vector."""
        pooled, ok = self.pooled(e)
        if not ok:
            return pooled, False
        return self.desc_proj(pooled[None]).value[0], True

    def encode_many(self, entities: Sequence[Entity]) -> np.ndarray:
        if not entities:
            return np.zeros((0, self.dim))
        pooled = [self.pooled(e) for e in entities]
        x = np.stack([p for p, _ in pooled])
        ok = np.array([f for _, f in pooled])
        return self.desc_proj(x).value * ok[:, None]

    def to_dict(self) -> dict:
        return {"margin": self.margin, "desc_proj": self.desc_proj.to_dict()}

    @classmethod
    def from_dict(cls, d: dict, wv: WordVectors) -> "TripletEntityEncoder":
        return cls(wv, nn.DenseLayer.from_dict(d["desc_proj"]), d["margin"])


def encode_entity_desc(enc: TripletEntityEncoder, e: Entity) -> tuple[np.ndarray, bool]:
    return enc.encode(e)


def build_triplets(kb: KnowledgeBase, wv: WordVectors, rng: np.random.Generator, k: int) -> list[TripletExample]:
    """Up to ``k`` (entity, positive, negative) triplets per entity.

    Positives are the entity's top-k in-vocabulary description tokens by TF-IDF
    (ties broken alphabetically; tokens occurring in every description carry no
    weight and are skipped). Each negative is drawn uniformly from in-vocabulary
    tokens of other descriptions and redrawn while it occurs in this one.
    """
    docs = {e.id: tokenize(e.description) for e in kb}
    docs = {eid: toks for eid, toks in docs.items() if toks}
    if not docs:
        raise NoEligibleEntities("no entity has a non-empty description")
    n_docs = len(docs)
    df = Counter(t for toks in docs.values() for t in set(toks))
    vocab_sets = {eid: {t for t in toks if t in wv} for eid, toks in docs.items()}

    out = []
    for eid, toks in docs.items():
        tf = Counter(toks)
        scored = []
        for tok, c in tf.items():
            if tok not in wv:
                continue
            weight = (c / len(toks)) * math.log(n_docs / df[tok])
            if weight > 0:
                scored.append((-weight, tok))
        scored.sort()
        positives = [tok for _, tok in scored[:k]]
        if not positives:
            continue
        pool = sorted(set().union(*(s for other, s in vocab_sets.items() if other != eid)))
        own = set(toks)
        for pos in positives:
            if not pool:
                break
            for _ in range(MAX_REDRAWS + 1):
                neg = pool[int(rng.integers(len(pool)))]
                if neg not in own:
                    out.append(TripletExample(eid, pos, neg))
                    break
    return out


def _triplet_arrays(enc: TripletEntityEncoder, triplets: Sequence[TripletExample], kb: KnowledgeBase):
    pooled = np.stack([enc.pooled(kb[t.entity_id])[0] for t in triplets])
    pos = np.stack([enc.wv.lookup(t.positive_word)[0] for t in triplets])
    neg = np.stack([enc.wv.lookup(t.negative_word)[0] for t in triplets])
    return pooled, pos, neg


def triplet_graph_loss(enc: TripletEntityEncoder, pooled, pos, neg) -> nn.Tensor:
    anchors = enc.desc_proj(pooled)
    return nn.mean(nn.triplet_loss(anchors, pos, neg, enc.margin))


def train_triplet(
    enc: TripletEntityEncoder,
    triplets: Sequence[TripletExample],
    kb: KnowledgeBase,
    epochs: int,
    lr: float,
    rng: np.random.Generator,
    batch_size: int = 1,
) -> tuple[TripletEntityEncoder, list[float]]:
    """SGD on the triplet hinge. Returns the (in-place updated) encoder and per-epoch mean loss."""
    if not triplets:
        raise ValueError("no triplets to train on")
    pooled, pos, neg = _triplet_arrays(enc, triplets, kb)
    n = len(triplets)
    params = enc.parameters()
    history = []
    for _ in range(epochs):
        order = rng.permutation(n)
        running = 0.0
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            loss = triplet_graph_loss(enc, pooled[batch], pos[batch], neg[batch])
            running += float(loss.value) * len(batch)
            if loss.requires_grad:
                nn.backward(loss)
                nn.sgd_step(params, lr)
        history.append(running / n)
    return enc, history


def triplet_satisfaction(enc: TripletEntityEncoder, triplets: Sequence[TripletExample], kb: KnowledgeBase) -> float:
    """Fraction of triplets with ``d(a, p) + margin <= d(a, n)``."""
    pooled, pos, neg = _triplet_arrays(enc, triplets, kb)
    anchors = enc.desc_proj(pooled).value
    d_pos = nn.cosine_distance(anchors, pos).value
    d_neg = nn.cosine_distance(anchors, neg).value
    return float(np.mean(d_pos + enc.margin <= d_neg))
