"""
Fuzzy name matching
===================

Three string metrics and their average, the score used for blocking and
for weak labels.
"""

from entlink.similarity import cosine_sim, edit_distance, fuzzy_score, jaro_sim, levenshtein_sim

# Cosine over character-bigram counts rewards shared fragments.
print("cosine      joe adam / jo adam :", round(cosine_sim("joe adam", "jo adam"), 4))

# Levenshtein similarity is one minus the edit distance over the longer length.
print("edit distance kitten / sitting :", edit_distance("kitten", "sitting"))
print("levenshtein kitten / sitting   :", round(levenshtein_sim("kitten", "sitting"), 4))

# Jaro counts characters matched within a window and their transpositions.
print("jaro        martha / marhta    :", round(jaro_sim("martha", "marhta"), 4))

# The fuzzy score is the plain mean of the three.
for a, b in [("joe adam", "joseph adam"), ("joe adam", "jo adam"), ("joe adam", "elon musk")]:
    s = fuzzy_score(a, b)
    print(f"{a!r:12} vs {b!r:14} cos={s.cosine:.3f} lev={s.levenshtein:.3f} "
          f"jaro={s.jaro:.3f} -> {s.average:.3f}")
