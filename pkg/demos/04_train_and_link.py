"""
Training the linker and resolving same-name entities
====================================================

Entities come in same-name pairs on different topics, so fuzzy matching alone
cannot tell them apart. The model combines name surfaces with the mention
context and the entity anchors.
"""

from entlink import fixtures, pipeline
from entlink.config import PipelineConfig

corpus = fixtures.topic_corpus(n_names=25, mentions_per_entity=2, seed=42)
wv = fixtures.synthetic_word_vectors(seed=42)
cfg = PipelineConfig(seed=42)
print(len(corpus.kb), "entities,", len(corpus.mentions), "mentions,", len(corpus.pairs), "labeled pairs")
print("example mention:", corpus.mentions[0])

result = pipeline.train(corpus.kb, corpus.mentions, wv, cfg, pairs=corpus.pairs, test_fraction=0.2)
print("triplet loss", round(result.triplet_history[0], 4), "->", round(result.triplet_history[-1], 4))
print("last epoch", result.history[-1])

rep = pipeline.evaluate(result.model, result.test_pairs, corpus.mentions, corpus.kb)
print("held out:", {k: round(v, 4) for k, v in rep.items() if isinstance(v, float)})

# Two entities named "david davis": a farm owner and a politician.
kb, mentions = fixtures.david_davis()
for c in pipeline.block(mentions, kb, cfg)[0]:
    print("candidate", c.entity_id, "fuzzy", c.fuzzy_score)
decision = pipeline.link(result.model, mentions, kb, cfg)[0]
for eid, fz, score in decision.candidates:
    print(f"  {eid:12} model score {score:.3f}")
print("linked to", decision.entity_id)
