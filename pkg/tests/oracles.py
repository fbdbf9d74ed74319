"""Slow, obviously-correct reference implementations used to check the fast paths."""
import math
from collections import Counter
from functools import lru_cache
from itertools import combinations


def edit_distance(a, b):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def levenshtein(a, b):
    if a == b:
        return 1.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


def jaro(a, b):
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(0, max(len(a), len(b)) // 2 - 1)
    used_b = [False] * len(b)
    matched_a = []
    for i, ch in enumerate(a):
        for j in range(len(b)):
            if abs(i - j) <= window and not used_b[j] and b[j] == ch:
                used_b[j] = True
                matched_a.append(ch)
                break
    m = len(matched_a)
    if m == 0:
        return 0.0
    matched_b = [ch for ch, used in zip(b, used_b) if used]
    half = sum(x != y for x, y in zip(matched_a, matched_b))
    t = half / 2
    return (m / len(a) + m / len(b) + (m - t) / m) / 3.0


def bigrams(s):
    return Counter(s[i:i + 2] for i in range(len(s) - 1))


def cosine(a, b):
    if a == b:
        return 1.0
    ca, cb = bigrams(a), bigrams(b)
    dot = sum(ca[g] * cb[g] for g in ca)
    if dot == 0:
        return 0.0
    na = sum(v * v for v in ca.values())
    nb = sum(v * v for v in cb.values())
    return dot / math.sqrt(na * nb)


def fuzzy(a, b):
    c, l, j = cosine(a, b), levenshtein(a, b), jaro(a, b)
    return (c + l + j) / 3.0


def auc_pairs(scores, labels):
    """Enumerate every positive/negative pair."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def brute_candidates(text, entities, threshold):
    """All (entity_id, best score) with score >= threshold, sorted (-score, id)."""
    out = []
    for e in entities:
        best = max(fuzzy(text, s) for s in e.surfaces)
        if best >= threshold:
            out.append((e.id, best))
    return sorted(out, key=lambda t: (-t[1], t[0]))
