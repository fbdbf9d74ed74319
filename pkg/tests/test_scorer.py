import numpy as np
import pytest

from entlink import fixtures, nn
from entlink.core import CandidatePair, Entity, KnowledgeBase, Mention
from entlink.errors import ShapeMismatch
from entlink.model import EntityLinker
from entlink.scorer import (Scorer, ScorerConfig, decide, entity_embedding, link_mention, mention_embedding,
                            score_pair)
from entlink.semantic import BagOfEmbeddings, TripletEntityEncoder
from entlink.surface import SurfaceConfig

D_S, D_F, D_CTX = 3, 2, 2


def make_scorer(rng=None, proj="identity", head="random", **cfg):
    cfg = ScorerConfig(fused_dim=D_F, hidden=4, **cfg)
    if proj == "identity":
        mp = nn.DenseLayer(np.eye(D_F), np.zeros(D_F))
        ep = nn.DenseLayer(np.eye(D_F), np.zeros(D_F))
    else:
        mp = nn.DenseLayer.init(rng, D_CTX, D_F)
        ep = nn.DenseLayer.init(rng, D_CTX, D_F)
    act = "identity" if cfg.linear_head else "relu"
    if head == "zero":
        hidden = nn.DenseLayer.zeros(2 * (D_S + D_F), 4, act)
        out = nn.DenseLayer.zeros(4, 1)
    else:
        hidden = nn.DenseLayer.init(rng, 2 * (D_S + D_F), 4, act)
        out = nn.DenseLayer.init(rng, 4, 1)
    return Scorer(cfg, mp, ep, hidden, out)


def test_embedding_examples(rng):
    s = make_scorer(rng)
    surface = np.array([0.1, 0.2, 0.3])
    assert mention_embedding(s, surface, np.zeros(2)).tolist() == [0.1, 0.2, 0.3, 0, 0]
    assert mention_embedding(s, surface, [4.0, 5.0]).tolist() == [0.1, 0.2, 0.3, 4, 5]
    assert entity_embedding(s, surface, np.zeros(2)).tolist() == [0.1, 0.2, 0.3, 0, 0]
    assert entity_embedding(s, surface, [-1.0, 2.0]).tolist() == [0.1, 0.2, 0.3, -1, 2]
    r = make_scorer(rng, proj="random")
    assert mention_embedding(r, surface, [9.0, 9.0]).shape == (D_S + D_F,)


def test_embedding_shape_errors(rng):
    s = make_scorer(rng)
    with pytest.raises(ShapeMismatch):
        mention_embedding(s, np.zeros(4), np.zeros(2))
    with pytest.raises(ShapeMismatch):
        entity_embedding(s, np.zeros(3), np.zeros(5))
    with pytest.raises(ShapeMismatch):
        score_pair(s, np.zeros(5), np.zeros(4))


def test_zero_head_scores_half(rng):
    s = make_scorer(rng, head="zero")
    for _ in range(10):
        m, e = rng.normal(size=(2, 5)) * 100
        assert score_pair(s, m, e) == 0.5


def test_scores_inside_unit_interval(rng):
    s = make_scorer(rng)
    for _ in range(200):
        m, e = rng.normal(size=(2, 5)) * 3
        assert 0.0 < score_pair(s, m, e) < 1.0


def test_head_is_not_symmetric():
    # search a few random parameter points for a pair whose score changes on swap
    for seed in range(20):
        rng = nn.make_rng(seed)
        s = make_scorer(rng)
        m, e = rng.normal(size=(2, 5))
        if abs(score_pair(s, m, e) - score_pair(s, e, m)) > 1e-3:
            return
    pytest.fail("no asymmetric example found")


def test_decide_threshold(rng):
    s = make_scorer(rng)
    assert decide(s, 0.5) is False
    assert decide(s, 0.5000001) is True
    assert decide(s, 0.4) is False
    grid = np.linspace(0.01, 0.99, 99)
    flags = [decide(s, x) for x in grid]
    assert flags == sorted(flags)


def test_threshold_range():
    with pytest.raises(ValueError):
        ScorerConfig(decision_threshold=0.4)
    assert not make_scorer(nn.make_rng(0), decision_threshold=0.7).decide(0.65)


def test_linear_head_collapses_to_affine(rng):
    s = make_scorer(rng, linear_head=True)
    w = s.out.weights.value @ s.hidden.weights.value
    b = s.out.weights.value @ s.hidden.bias.value + s.out.bias.value
    m, e = rng.normal(size=(2, 5))
    z = w @ np.concatenate([m, e]) + b
    assert score_pair(s, m, e) == pytest.approx(1 / (1 + np.exp(-z[0])), abs=1e-14)


class FixedScores:
    """Stands in for a model, returning preset scores per entity id."""

    def __init__(self, scores):
        self.scores = scores
        self.scorer = make_scorer(nn.make_rng(0))

    def score(self, mentions, entities, surfaces=None):
        return np.array([self.scores[e.id] for e in entities])


KB = KnowledgeBase([Entity(f"e{i}", f"name {i}") for i in range(1, 5)])
M = Mention("d", "name", "")


def cands(*ids):
    return [CandidatePair(0, i, 0.9) for i in ids]


def test_link_mention_examples():
    d = link_mention(FixedScores({}), M, [], KB)
    assert d.entity_id is None and not d.linked
    d = link_mention(FixedScores({"e1": 0.9}), M, cands("e1"), KB)
    assert d.entity_id == "e1" and d.score == 0.9 and d.linked
    d = link_mention(FixedScores({"e1": 0.7, "e2": 0.9}), M, cands("e1", "e2"), KB)
    assert d.entity_id == "e2"
    d = link_mention(FixedScores({"e1": 0.5, "e2": 0.2}), M, cands("e1", "e2"), KB)
    assert d.entity_id is None and len(d.candidates) == 2


def test_link_mention_tie_goes_to_smallest_id():
    d = link_mention(FixedScores({"e3": 0.8, "e2": 0.8, "e4": 0.6}), M, cands("e3", "e4", "e2"), KB)
    assert d.entity_id == "e2"


@pytest.mark.parametrize("transform", [
    lambda s: 0.5 + 0.5 * (2 * s - 1) ** 3,
    lambda s: 0.5 + 0.49 * np.tanh(10 * (s - 0.5)),
    lambda s: 0.5 + (s - 0.5) / 2,
])
def test_argmax_invariance(rng, transform):
    # increasing maps of (0.5, 1) into itself keep the passing set and its order
    for _ in range(50):
        raw = rng.uniform(0.51, 0.99, size=4)
        ids = [f"e{i}" for i in range(1, 5)]
        a = link_mention(FixedScores(dict(zip(ids, raw))), M, cands(*ids), KB)
        b = link_mention(FixedScores(dict(zip(ids, transform(raw)))), M, cands(*ids), KB)
        assert a.entity_id == b.entity_id


def test_roundtrip(rng):
    s = make_scorer(rng, proj="random")
    again = Scorer.from_dict(s.to_dict())
    m, e = rng.normal(size=(2, 5))
    assert score_pair(s, m, e) == score_pair(again, m, e)


def _small_linker(seed, linear_head=False):
    wv = fixtures.synthetic_word_vectors(dim=6, seed=1)
    rng = nn.make_rng(seed)
    ent = TripletEntityEncoder.init(wv, rng)
    return EntityLinker.init(BagOfEmbeddings(wv), ent, rng,
                             SurfaceConfig(max_chars=6, max_words=3, char_dim=3, word_dim=5, surface_dim=4),
                             ScorerConfig(fused_dim=3, hidden=6, linear_head=linear_head))


@pytest.mark.parametrize("linear_head", [False, True])
def test_end_to_end_gradient_check(linear_head):
    model = _small_linker(11, linear_head)
    kb, mentions = fixtures.demo_corpus()
    ms = [mentions[0]] * 3 + [Mention("d2", "elon", "rockets software startup")]
    es = [kb["e1"], kb["e2"], kb["e3"], kb["e2"]]
    feats = model.features(ms, es)
    y = np.array([1.0, 0.0, 0.0, 1.0])
    err = nn.grad_check(lambda: nn.mean(nn.bce(model.forward(feats), y)),
                        model.trainable_parameters(), 1e-5)
    assert err < 1e-4


def test_full_graph_determinism():
    kb, mentions = fixtures.demo_corpus()
    a = _small_linker(5).score(mentions * 3, list(kb))
    b = _small_linker(5).score(mentions * 3, list(kb))
    assert a.tobytes() == b.tobytes()
