"""Pretrained word vectors in word2vec text format, with zero-vector OOV handling."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .core import normalize
from .errors import BadHeader, DimMismatch, DuplicateToken, NonFiniteValue


class WordVectors:
    """Immutable token -> vector table of fixed dimension."""

    def __init__(self, tokens: Sequence[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens) or matrix.shape[1] < 1:
            raise ValueError("matrix must be (len(tokens), dim) with dim >= 1")
        index = {}
        for i, tok in enumerate(tokens):
            if tok in index:
                raise DuplicateToken(tok)
            index[tok] = i
        self.tokens = tuple(tokens)
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self._index = index

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def lookup(self, token: str) -> tuple[np.ndarray, bool]:
        """Return ``(vector, found)``; unknown tokens map to the zero vector."""
        i = self._index.get(token)
        if i is None:
            return np.zeros(self.dim), False
        return self.matrix[i].copy(), True

    def mean_pool(self, tokens: Iterable[str]) -> np.ndarray:
        """Mean over in-vocabulary tokens only; zero vector if none are found."""
        rows = [self._index[t] for t in tokens if t in self._index]
        if not rows:
            return np.zeros(self.dim)
        return self.matrix[rows].mean(axis=0)


def lookup(wv: WordVectors, token: str) -> tuple[np.ndarray, bool]:
    return wv.lookup(token)


def mean_pool(wv: WordVectors, tokens: Iterable[str]) -> np.ndarray:
    return wv.mean_pool(tokens)


def load_word_vectors(source: Iterable[str]) -> WordVectors:
    """Parse ``count dim`` header followed by ``token v1 ... v_dim`` lines."""
    lines = iter(source)
    try:
        header = next(lines)
    except StopIteration:
        raise BadHeader("empty word-vector file") from None
    parts = header.split()
    try:
        count, dim = (int(p) for p in parts)
    except ValueError:
        raise BadHeader(f"expected 'count dim', got {header.strip()!r}") from None
    if count < 0 or dim < 1:
        raise BadHeader(f"invalid header {header.strip()!r}")

    tokens: list[str] = []
    seen: set[str] = set()
    matrix = np.empty((count, dim))
    for lineno, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        fields = line.rstrip("\n").split(" ")
        token = normalize(fields[0])
        values = fields[1:]
        if len(values) != dim:
            raise DimMismatch(lineno, dim, len(values))
        if len(tokens) >= count:
            raise BadHeader(f"more than {count} vectors (line {lineno})")
        if token in seen:
            raise DuplicateToken(token)
        try:
            row = [float(v) for v in values]
        except ValueError:
            raise DimMismatch(lineno, dim, len(values)) from None
        if not all(math.isfinite(v) for v in row):
            raise NonFiniteValue(lineno)
        matrix[len(tokens)] = row
        tokens.append(token)
        seen.add(token)
    if len(tokens) != count:
        raise BadHeader(f"header declares {count} vectors, found {len(tokens)}")
    return WordVectors(tokens, matrix)


def dump_word_vectors(wv: WordVectors) -> str:
    out = [f"{len(wv)} {wv.dim}\n"]
    for tok, row in zip(wv.tokens, wv.matrix):
        out.append(tok + " " + " ".join(f"{v:.9g}" for v in row) + "\n")
    return "".join(out)


def read_word_vectors(path) -> WordVectors:
    with open(path, encoding="utf-8") as fh:
        return load_word_vectors(fh)
