"""
Entity anchors from descriptions
================================

A dense layer maps the mean of an entity's description words to an anchor
vector. Triplet training pulls the anchor toward a representative word of its
own description and away from a word of another entity's description.
"""

import numpy as np

from entlink import fixtures, nn
from entlink.semantic import TripletEntityEncoder, build_triplets, train_triplet, triplet_satisfaction

wv = fixtures.synthetic_word_vectors(seed=42)
kb = fixtures.finance_military()

rng = nn.make_rng(42)
enc = TripletEntityEncoder.init(wv, rng)
triplets = build_triplets(kb, wv, rng, k=1)
print("triplets:", [(t.entity_id, t.positive_word, t.negative_word) for t in triplets])


def distances(eid):
    anchor = enc.encode(kb[eid])[0][None]
    return {w: round(float(nn.cosine_distance(anchor, wv.lookup(w)[0][None]).value[0]), 3)
            for w in ("finance", "military")}


print("before:", {e.id: distances(e.id) for e in kb})
_, history = train_triplet(enc, triplets, kb, epochs=200, lr=0.01, rng=rng)
print("after: ", {e.id: distances(e.id) for e in kb})
print("loss", round(history[0], 4), "->", round(history[-1], 4))

# A larger corpus: 20 entities with private vocabularies.
kb, wv = fixtures.disjoint_topic_corpus()
rng = nn.make_rng(42)
enc = TripletEntityEncoder.init(wv, rng)
triplets = build_triplets(kb, wv, rng, k=5)
print("satisfied before:", triplet_satisfaction(enc, triplets, kb))
train_triplet(enc, triplets, kb, epochs=500, lr=0.01, rng=rng)
print("satisfied after: ", triplet_satisfaction(enc, triplets, kb))
print("anchor norms:", np.round(np.linalg.norm(enc.encode_many(list(kb)[:5]), axis=1), 2))
