"""
Blocking
========

Keep only entities whose best name or alias scores at least the threshold
against the mention. This is the cheap filter in front of the neural model.
"""

from entlink import fixtures
from entlink.blocking import BlockingConfig, candidates, candidates_batch
from entlink.core import Entity, KnowledgeBase, Mention

kb, mentions = fixtures.demo_corpus()
for c in candidates(mentions[0], kb, BlockingConfig(0.5)):
    print(f"{mentions[0].text!r} -> {c.entity_id} via {c.surface!r}  fuzzy={c.fuzzy_score:.3f}")

# Aliases count too, and the best surface is reported.
kb = KnowledgeBase([
    Entity("nyc", "new york city", ("big apple", "nyc")),
    Entity("apple", "apple inc", ("apple computer",)),
])
for text in ("big apple", "apple computers", "new york"):
    got = candidates(Mention("d", text), kb)
    print(f"{text!r:18}", [(c.entity_id, c.surface, round(c.fuzzy_score, 3)) for c in got])

# Raising the threshold only ever removes candidates.
ms = [Mention("d", t) for t in ("big apple", "apple computers", "new york")]
for t in (0.5, 0.7, 0.9):
    print(t, [len(c) for c in candidates_batch(ms, kb, BlockingConfig(t))])
