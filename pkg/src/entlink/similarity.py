"""Cosine (character bigram), Levenshtein and Jaro similarity plus their average.

Inputs are expected to be normalized already (see :func:`entlink.core.normalize`).
The per-pair kernels are compiled with numba; :func:`score_matrix` runs them over
many mention/surface combinations for the blocking layer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import BothEmpty

# TBB is tried first by default and warns on old system installs
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

__all__ = [
    "FuzzyScore",
    "EncodedStrings",
    "edit_distance",
    "levenshtein_sim",
    "jaro_sim",
    "cosine_sim",
    "fuzzy_score",
    "encode_strings",
    "score_matrix",
    "component_matrix",
]


@dataclass(frozen=True)
class FuzzyScore:
    cosine: float
    levenshtein: float
    jaro: float
    average: float


# ---------------------------------------------------------------------------
# compiled kernels (operate on int32 code-point arrays)


@numba.njit(cache=True)
def _same(a, b):
    if a.shape[0] != b.shape[0]:
        return False
    for i in range(a.shape[0]):
        if a[i] != b[i]:
            return False
    return True


@numba.njit(cache=True)
def _edit_distance(a, b, prev, cur):
    la = a.shape[0]
    lb = b.shape[0]
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            best = cost
            if dele < best:
                best = dele
            if ins < best:
                best = ins
            cur[j] = best
        for j in range(lb + 1):
            prev[j] = cur[j]
    return prev[lb]


@numba.njit(cache=True)
def _levenshtein(a, b, prev, cur):
    if _same(a, b):
        return 1.0
    la = a.shape[0]
    lb = b.shape[0]
    longest = la if la > lb else lb
    d = _edit_distance(a, b, prev, cur)
    return 1.0 - d / longest


@numba.njit(cache=True)
def _jaro(a, b, flags_a, flags_b):
    if _same(a, b):
        return 1.0
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0 or lb == 0:
        return 0.0
    window = (la if la > lb else lb) // 2 - 1
    if window < 0:
        window = 0
    for i in range(la):
        flags_a[i] = False
    for j in range(lb):
        flags_b[j] = False
    m = 0
    for i in range(la):
        lo = i - window
        if lo < 0:
            lo = 0
        hi = i + window + 1
        if hi > lb:
            hi = lb
        for j in range(lo, hi):
            if not flags_b[j] and a[i] == b[j]:
                flags_a[i] = True
                flags_b[j] = True
                m += 1
                break
    if m == 0:
        return 0.0
    half = 0
    k = 0
    for i in range(la):
        if flags_a[i]:
            while not flags_b[k]:
                k += 1
            if a[i] != b[k]:
                half += 1
            k += 1
    t = half / 2
    return (m / la + m / lb + (m - t) / m) / 3.0


@numba.njit(cache=True)
def _cosine(a, b, keys_a, cnt_a, norm_a, keys_b, cnt_b, norm_b):
    if _same(a, b):
        return 1.0
    if keys_a.shape[0] == 0 or keys_b.shape[0] == 0:
        return 0.0
    dot = 0
    i = 0
    j = 0
    while i < keys_a.shape[0] and j < keys_b.shape[0]:
        if keys_a[i] == keys_b[j]:
            dot += cnt_a[i] * cnt_b[j]
            i += 1
            j += 1
        elif keys_a[i] < keys_b[j]:
            i += 1
        else:
            j += 1
    if dot == 0:
        return 0.0
    return dot / np.sqrt(float(norm_a * norm_b))


@numba.njit(cache=True)
def _pair_scores(a, b, ka, ca, na, kb, cb, nb, prev, cur, fa, fb):
    c = _cosine(a, b, ka, ca, na, kb, cb, nb)
    lev = _levenshtein(a, b, prev, cur)
    j = _jaro(a, b, fa, fb)
    return c, lev, j


@numba.njit(cache=True, parallel=True)
def _score_matrix(
    m_codes, m_off, m_keys, m_cnts, m_koff, m_norm,
    s_codes, s_off, s_keys, s_cnts, s_koff, s_norm,
    s_owner, n_owners, max_len,
):
    n_m = m_off.shape[0] - 1
    n_s = s_off.shape[0] - 1
    best = np.full((n_m, n_owners), -1.0)
    best_surface = np.full((n_m, n_owners), -1, dtype=np.int64)
    for mi in numba.prange(n_m):
        prev = np.empty(max_len + 1, dtype=np.int64)
        cur = np.empty(max_len + 1, dtype=np.int64)
        fa = np.empty(max_len + 1, dtype=np.bool_)
        fb = np.empty(max_len + 1, dtype=np.bool_)
        a = m_codes[m_off[mi]:m_off[mi + 1]]
        ka = m_keys[m_koff[mi]:m_koff[mi + 1]]
        ca = m_cnts[m_koff[mi]:m_koff[mi + 1]]
        na = m_norm[mi]
        for si in range(n_s):
            b = s_codes[s_off[si]:s_off[si + 1]]
            kb = s_keys[s_koff[si]:s_koff[si + 1]]
            cb = s_cnts[s_koff[si]:s_koff[si + 1]]
            c, lev, j = _pair_scores(a, b, ka, ca, na, kb, cb, s_norm[si], prev, cur, fa, fb)
            avg = (c + lev + j) / 3.0
            owner = s_owner[si]
            # ties between surfaces of one entity keep the earliest surface
            if avg > best[mi, owner]:
                best[mi, owner] = avg
                best_surface[mi, owner] = si
    return best, best_surface


@numba.njit(cache=True, parallel=True)
def _component_matrix(
    a_codes, a_off, a_keys, a_cnts, a_koff, a_norm,
    b_codes, b_off, b_keys, b_cnts, b_koff, b_norm, max_len,
):
    n_a = a_off.shape[0] - 1
    n_b = b_off.shape[0] - 1
    out = np.empty((3, n_a, n_b))
    for i in numba.prange(n_a):
        prev = np.empty(max_len + 1, dtype=np.int64)
        cur = np.empty(max_len + 1, dtype=np.int64)
        fa = np.empty(max_len + 1, dtype=np.bool_)
        fb = np.empty(max_len + 1, dtype=np.bool_)
        a = a_codes[a_off[i]:a_off[i + 1]]
        ka = a_keys[a_koff[i]:a_koff[i + 1]]
        ca = a_cnts[a_koff[i]:a_koff[i + 1]]
        for j in range(n_b):
            b = b_codes[b_off[j]:b_off[j + 1]]
            kb = b_keys[b_koff[j]:b_koff[j + 1]]
            cb = b_cnts[b_koff[j]:b_koff[j + 1]]
            c, lev, jr = _pair_scores(a, b, ka, ca, a_norm[i], kb, cb, b_norm[j], prev, cur, fa, fb)
            out[0, i, j] = c
            out[1, i, j] = lev
            out[2, i, j] = jr
    return out


# ---------------------------------------------------------------------------
# encoding strings for the kernels


def _code_array(s: str) -> np.ndarray:
    return np.fromiter((ord(ch) for ch in s), dtype=np.int32, count=len(s))


def _bigram_counts(s: str) -> tuple[np.ndarray, np.ndarray, int]:
    if len(s) < 2:
        return np.empty(0, np.int64), np.empty(0, np.int64), 0
    codes = _code_array(s).astype(np.int64)
    grams = (codes[:-1] << 21) | codes[1:]
    keys, counts = np.unique(grams, return_counts=True)
    counts = counts.astype(np.int64)
    return keys, counts, int(np.dot(counts, counts))


@dataclass(frozen=True)
class EncodedStrings:
    """A batch of strings packed into flat arrays for the compiled kernels."""

    strings: tuple[str, ...]
    codes: np.ndarray
    offsets: np.ndarray
    keys: np.ndarray
    counts: np.ndarray
    key_offsets: np.ndarray
    norms: np.ndarray

    @property
    def max_len(self) -> int:
        return int(np.diff(self.offsets).max(initial=0))

    def item(self, i: int):
        sl = slice(self.offsets[i], self.offsets[i + 1])
        ks = slice(self.key_offsets[i], self.key_offsets[i + 1])
        return self.codes[sl], self.keys[ks], self.counts[ks], self.norms[i]


def encode_strings(strings) -> EncodedStrings:
    strings = tuple(strings)
    codes = [_code_array(s) for s in strings]
    grams = [_bigram_counts(s) for s in strings]
    offsets = np.zeros(len(strings) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(c) for c in codes])
    key_offsets = np.zeros(len(strings) + 1, dtype=np.int64)
    key_offsets[1:] = np.cumsum([len(g[0]) for g in grams])

    def cat(parts, dtype):
        return np.concatenate(parts).astype(dtype) if parts else np.empty(0, dtype)

    return EncodedStrings(
        strings=strings,
        codes=cat(codes, np.int32),
        offsets=offsets,
        keys=cat([g[0] for g in grams], np.int64),
        counts=cat([g[1] for g in grams], np.int64),
        key_offsets=key_offsets,
        norms=np.array([g[2] for g in grams], dtype=np.int64),
    )


def score_matrix(mentions: EncodedStrings, surfaces: EncodedStrings, owner, n_owners):
    """Best fuzzy average per (mention, owner) over all surfaces of each owner.

    ``owner[i]`` is the owner index (entity position) of surface ``i``. Returns
    ``(scores, surface_index)``, both of shape ``(len(mentions), n_owners)``;
    owners without surfaces score -1.
    """
    max_len = max(mentions.max_len, surfaces.max_len)
    return _score_matrix(
        mentions.codes, mentions.offsets, mentions.keys, mentions.counts,
        mentions.key_offsets, mentions.norms,
        surfaces.codes, surfaces.offsets, surfaces.keys, surfaces.counts,
        surfaces.key_offsets, surfaces.norms,
        np.asarray(owner, dtype=np.int64), int(n_owners), max_len,
    )


def component_matrix(a: EncodedStrings, b: EncodedStrings) -> np.ndarray:
    """Array ``(3, len(a), len(b))`` of cosine, Levenshtein and Jaro similarities.

    Pairs of two empty strings are not rejected here; their entries are 1.
    """
    max_len = max(a.max_len, b.max_len)
    return _component_matrix(
        a.codes, a.offsets, a.keys, a.counts, a.key_offsets, a.norms,
        b.codes, b.offsets, b.keys, b.counts, b.key_offsets, b.norms, max_len,
    )


# ---------------------------------------------------------------------------
# scalar API


def _check(a: str, b: str) -> None:
    if not a and not b:
        raise BothEmpty()


def _scratch(a: str, b: str):
    n = max(len(a), len(b)) + 1
    return np.empty(n, np.int64), np.empty(n, np.int64)


def edit_distance(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute distance."""
    prev, cur = _scratch(a, b)
    return int(_edit_distance(_code_array(a), _code_array(b), prev, cur))


def levenshtein_sim(a: str, b: str) -> float:
    """``1 - edit_distance / max(len)``."""
    _check(a, b)
    prev, cur = _scratch(a, b)
    return float(_levenshtein(_code_array(a), _code_array(b), prev, cur))


def jaro_sim(a: str, b: str) -> float:
    _check(a, b)
    n = max(len(a), len(b)) + 1
    return float(
        _jaro(_code_array(a), _code_array(b), np.empty(n, np.bool_), np.empty(n, np.bool_))
    )


def cosine_sim(a: str, b: str) -> float:
    """Cosine between character-bigram count vectors (spaces count as characters)."""
    _check(a, b)
    ka, ca, na = _bigram_counts(a)
    kb, cb, nb = _bigram_counts(b)
    return float(_cosine(_code_array(a), _code_array(b), ka, ca, na, kb, cb, nb))


def fuzzy_score(a: str, b: str) -> FuzzyScore:
    _check(a, b)
    c, lev, j = cosine_sim(a, b), levenshtein_sim(a, b), jaro_sim(a, b)
    return FuzzyScore(c, lev, j, (c + lev + j) / 3.0)
