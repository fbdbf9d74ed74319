"""Hierarchical surface encoder: characters -> words -> one name vector."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import nn
from .errors import EmptyName, EmptyWord, ShapeMismatch

PAD = -1


class CharVocab:
    """Fixed character inventory with a trailing out-of-vocabulary slot."""

    DEFAULT_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789 '-."

    def __init__(self, chars: str = DEFAULT_CHARS):
        if len(set(chars)) != len(chars):
            raise ValueError("duplicate characters in vocabulary")
        self.chars = chars
        self._index = {c: i for i, c in enumerate(chars)}

    @property
    def oov(self) -> int:
        return len(self.chars)

    def __len__(self) -> int:
        return len(self.chars) + 1

    def __getitem__(self, ch: str) -> int:
        return self._index.get(ch, self.oov)


@dataclass(frozen=True)
class SurfaceConfig:
    max_chars: int = 16
    max_words: int = 6
    char_dim: int = 16
    word_dim: int = 32
    surface_dim: int = 32


class SurfaceEncoder:
    """Char table, per-word projection of concatenated chars, mean-pool + dense over words.

    The pad character embedding is a constant zero and never trained.
    """

    def __init__(self, cfg: SurfaceConfig, char_table, word_proj: nn.DenseLayer,
                 entity_pool: nn.DenseLayer, vocab: CharVocab | None = None):
        self.cfg = cfg
        self.vocab = vocab or CharVocab()
        self.char_table = nn.parameter(char_table, "char_table")
        self.word_proj = word_proj
        self.entity_pool = entity_pool
        expected = (
            (len(self.vocab), cfg.char_dim),
            (cfg.word_dim, cfg.max_chars * cfg.char_dim),
            (cfg.surface_dim, cfg.word_dim),
        )
        got = (self.char_table.shape, word_proj.weights.shape, entity_pool.weights.shape)
        if expected != got:
            raise ShapeMismatch(f"surface encoder shapes {got}, expected {expected}")

    @classmethod
    def init(cls, cfg: SurfaceConfig, rng: np.random.Generator) -> "SurfaceEncoder":
        vocab = CharVocab()
        table = nn.glorot_uniform(rng, len(vocab), cfg.char_dim)
        word_proj = nn.DenseLayer.init(rng, cfg.max_chars * cfg.char_dim, cfg.word_dim, "tanh")
        entity_pool = nn.DenseLayer.init(rng, cfg.word_dim, cfg.surface_dim, "tanh")
        return cls(cfg, table, word_proj, entity_pool, vocab)

    def parameters(self) -> list[nn.Tensor]:
        return [self.char_table, *self.word_proj.parameters(), *self.entity_pool.parameters()]

    # -- indexing ---------------------------------------------------------

    def word_indices(self, word: str) -> np.ndarray:
        idx = np.full(self.cfg.max_chars, PAD, dtype=np.int64)
        for i, ch in enumerate(word[: self.cfg.max_chars]):
            idx[i] = self.vocab[ch]
        return idx

    def index_names(self, names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
        """Char indices ``(B, max_words, max_chars)`` and word mask ``(B, max_words)``."""
        cfg = self.cfg
        idx = np.full((len(names), cfg.max_words, cfg.max_chars), PAD, dtype=np.int64)
        mask = np.zeros((len(names), cfg.max_words))
        for b, name in enumerate(names):
            words = name.split()
            if not words:
                raise EmptyName(name)
            for w, word in enumerate(words[: cfg.max_words]):
                idx[b, w] = self.word_indices(word)
                mask[b, w] = 1.0
        return idx, mask

    # -- forward ----------------------------------------------------------

    def words_forward(self, idx) -> nn.Tensor:
        """Word vectors for char indices of shape ``(..., max_chars)``."""
        chars = nn.embed(self.char_table, idx)
        flat = nn.reshape(chars, idx.shape[:-1] + (self.cfg.max_chars * self.cfg.char_dim,))
        return self.word_proj(flat)

    def forward(self, idx, mask) -> nn.Tensor:
        words = self.words_forward(idx)
        return self.entity_pool(nn.masked_mean(words, mask))

    def encode_word(self, word: str) -> np.ndarray:
        if not word:
            raise EmptyWord("cannot encode an empty word")
        return self.words_forward(self.word_indices(word)[None]).value[0]

    def encode_surface(self, name: str) -> np.ndarray:
        idx, mask = self.index_names([name])
        return self.forward(idx, mask).value[0]

    def encode_many(self, names: Sequence[str]) -> np.ndarray:
        idx, mask = self.index_names(names)
        return self.forward(idx, mask).value

    # -- persistence ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.cfg),
            "chars": self.vocab.chars,
            "char_table": {
                "shape": list(self.char_table.shape),
                "values": self.char_table.value.ravel().tolist(),
            },
            "word_proj": self.word_proj.to_dict(),
            "entity_pool": self.entity_pool.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SurfaceEncoder":
        table = np.asarray(d["char_table"]["values"], dtype=np.float64)
        return cls(
            SurfaceConfig(**d["config"]),
            table.reshape(d["char_table"]["shape"]),
            nn.DenseLayer.from_dict(d["word_proj"]),
            nn.DenseLayer.from_dict(d["entity_pool"]),
            CharVocab(d["chars"]),
        )


def encode_word(enc: SurfaceEncoder, word: str) -> np.ndarray:
    return enc.encode_word(word)


def encode_surface(enc: SurfaceEncoder, name: str) -> np.ndarray:
    return enc.encode_surface(name)
