"""Built-in synthetic corpora: word vectors with topic structure and small knowledge bases.

These stand in for a real KB, news stream and fastText model in tests, demos and
``entlink fixtures``. Everything is generated from a seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Entity, KnowledgeBase, Mention
from .nn import make_rng
from .trainer import LabeledPair
from .vectors import WordVectors

TOPICS: dict[str, tuple[str, ...]] = {
    "finance": ("finance", "bank", "investment", "capital", "equity", "fund", "trading",
                "market", "stock", "banker", "portfolio", "credit"),
    "military": ("military", "army", "soldier", "weapons", "troops", "navy", "defense",
                 "combat", "battalion", "missile", "war", "aircraft"),
    "politics": ("politics", "government", "minister", "parliament", "election", "policy",
                 "party", "vote", "cabinet", "senator", "politician", "diplomat"),
    "farming": ("farm", "farming", "cattle", "harvest", "crops", "ranch", "tractor",
                "livestock", "agriculture", "dairy", "orchard", "sweetwater"),
    "film": ("film", "director", "movie", "cinema", "studio", "actor", "screenplay",
             "hollywood", "producer", "batman", "superhero", "syncopy"),
    "sports": ("sports", "football", "basketball", "coach", "league", "player", "stadium",
               "championship", "team", "goalkeeper", "tournament", "athlete"),
    "technology": ("technology", "software", "computer", "engineer", "startup", "internet",
                   "chip", "data", "cloud", "robotics", "algorithm", "silicon"),
    "medicine": ("medicine", "hospital", "doctor", "surgeon", "clinical", "patient",
                 "vaccine", "nurse", "disease", "pharmacy", "cardiology", "research"),
}

FILLER = ("the", "a", "of", "and", "to", "in", "on", "for", "with", "said", "says", "about",
          "why", "needs", "explains", "make", "decision", "aspects", "fundamental", "new",
          "year", "also", "known", "as", "his", "her", "their", "primarily", "works",
          "former", "member", "after", "show", "pictures", "is", "was", "will", "news",
          "report", "week", "business", "owner", "company", "people", "british", "american")

# first names with common short forms
FIRST_NAMES: dict[str, tuple[str, ...]] = {
    "joseph": ("joe",), "william": ("bill", "will"), "christopher": ("chris",),
    "michael": ("mike",), "robert": ("bob", "rob"), "elizabeth": ("liz", "beth"),
    "katherine": ("kate",), "jonathan": ("jon",), "thomas": ("tom",),
    "richard": ("rick",), "margaret": ("maggie", "meg"), "alexander": ("alex",),
    "daniel": ("dan",), "samuel": ("sam",), "benjamin": ("ben",), "patricia": ("pat",),
    "jennifer": ("jen",), "edward": ("ed", "ted"), "anthony": ("tony",),
    "nicholas": ("nick",), "victoria": ("vicky",), "stephen": ("steve",),
    "rebecca": ("becky",), "andrew": ("andy",), "susan": ("sue",),
}

LAST_NAMES = ("adam", "miller", "gates", "turner", "harris", "walker", "young", "king",
              "wright", "hill", "green", "baker", "nelson", "carter", "mitchell", "roberts",
              "phillips", "evans", "collins", "stewart", "morris", "rogers", "reed", "cook",
              "bell", "murphy", "bailey", "cooper", "howard", "ward", "brooks", "gray",
              "james", "watson", "hughes", "price", "sanders", "ross", "foster", "powell")


def synthetic_word_vectors(dim: int = 50, seed: int = 0, noise: float = 0.6,
                           topics: dict[str, tuple[str, ...]] | None = None,
                           filler: tuple[str, ...] = FILLER) -> WordVectors:
    """Topic words scatter around a per-topic unit centroid; filler words are isotropic noise."""
    rng = make_rng(seed)
    topics = TOPICS if topics is None else topics
    tokens, rows = [], []
    for words in topics.values():
        centroid = rng.normal(size=dim)
        centroid /= np.linalg.norm(centroid)
        for w in words:
            tokens.append(w)
            rows.append(centroid + noise * rng.normal(size=dim) / np.sqrt(dim))
    for w in filler:
        tokens.append(w)
        rows.append(rng.normal(size=dim) / np.sqrt(dim))
    return WordVectors(tokens, np.array(rows))


def _sentence(rng, topic_words, n_topic, n_filler) -> str:
    words = list(rng.choice(topic_words, size=n_topic, replace=False))
    words += list(rng.choice(FILLER, size=n_filler))
    rng.shuffle(words)
    return " ".join(words)


# ---------------------------------------------------------------------------
# small named fixtures


def demo_corpus() -> tuple[KnowledgeBase, list[Mention]]:
    """Three entities and the single mention "joe adam"."""
    kb = KnowledgeBase([
        Entity("e1", "joseph adam", (), "joseph adam is a government minister and member of parliament"),
        Entity("e2", "elon musk", (), "elon musk founded a technology startup building software and rockets"),
        Entity("e3", "jeff bezos", (), "jeff bezos founded an internet company"),
    ])
    mentions = [Mention("doc1", "joe adam",
                        "make a decision about fundamental aspects joe adam explains why the government needs")]
    return kb, mentions


def finance_military() -> KnowledgeBase:
    """Two entities with single-word descriptions "finance" and "military"."""
    return KnowledgeBase([
        Entity("e1", "jo adam", (), "finance"),
        Entity("e2", "sam cole", (), "military"),
    ])


def david_davis() -> tuple[KnowledgeBase, list[Mention]]:
    """Two entities sharing the name "david davis"; the mention's context is political."""
    kb = KnowledgeBase([
        Entity("dd_farm", "david davis", ("dave davis",),
               "david hammeken davis, also known by his nickname as dave davis. david hammeken "
               "davis primarily works for sweetwater farm, a cattle ranch and dairy business."),
        Entity("dd_politics", "david davis", (),
               "david davis is a british politician, member of parliament and former cabinet "
               "minister in the government."),
    ])
    mentions = [Mention(
        "dj-001", "david davis",
        "david davis said the government and parliament must respond after pictures show the "
        "burning wrecks of russian aircraft; the minister called for a vote in cabinet",
        gold_id="dd_politics",
    )]
    return kb, mentions


def christopher_nolan() -> tuple[KnowledgeBase, list[Mention]]:
    kb = KnowledgeBase([
        Entity("cn_film", "christopher nolan", ("chris nolan",),
               "christopher jonathan james nolan, also known as chris nolan. christopher nolan "
               "primarily works for syncopy, a film studio and movie producer in hollywood."),
        Entity("cn_bank", "christopher nolen", (),
               "christopher nolen is a banker at an investment fund trading equity and credit."),
    ])
    mentions = [Mention(
        "dj-002", "christopher nolan",
        "christopher nolan: i don't think they are making them an elevated art form, cronenberg "
        "said of prominent director peers taking on superhero movie work; it is still batman "
        "running around in a stupid cape",
        gold_id="cn_film",
    )]
    return kb, mentions


# ---------------------------------------------------------------------------
# generated corpora


@dataclass
class Corpus:
    kb: KnowledgeBase
    mentions: list[Mention]
    pairs: list[LabeledPair]
    topics: dict[str, str]  # entity id -> topic


def topic_corpus(n_names: int = 25, mentions_per_entity: int = 2, seed: int = 42,
                 surface_negatives: bool = False) -> Corpus:
    """Same-name entity twins on different topics, with name-variant mentions.

    Every name is shared by two entities whose descriptions come from different
    topics. Each entity gets ``mentions_per_entity`` mentions whose text is the
    name or a short-form variant and whose context is drawn from the entity's
    topic. Labeled pairs per mention: the gold entity (1), its same-name twin (0)
    and, if ``surface_negatives``, a differently named entity on the gold topic (0).
    """
    rng = make_rng(seed)
    topic_names = sorted(TOPICS)
    firsts = sorted(FIRST_NAMES)
    combos = [(f, l) for f in firsts for l in LAST_NAMES]
    picks = rng.choice(len(combos), size=n_names, replace=False)
    entities, topics = [], {}
    for i, p in enumerate(sorted(picks)):
        first, last = combos[p]
        t1, t2 = rng.choice(len(topic_names), size=2, replace=False)
        for j, t in enumerate((t1, t2)):
            eid = f"E{i:03d}{'ab'[j]}"
            topic = topic_names[t]
            desc = f"{first} {last} " + _sentence(rng, TOPICS[topic], 6, 4)
            entities.append(Entity(eid, f"{first} {last}", (), desc))
            topics[eid] = topic
    kb = KnowledgeBase(entities)

    mentions, pairs = [], []
    by_topic: dict[str, list[str]] = {}
    for e in kb:
        by_topic.setdefault(topics[e.id], []).append(e.id)
    for e in kb:
        first, last = e.name.split()
        variants = [e.name] + [f"{v} {last}" for v in FIRST_NAMES[first]]
        twin = e.id[:-1] + ("b" if e.id.endswith("a") else "a")
        for k in range(mentions_per_entity):
            text = variants[int(rng.integers(len(variants)))] if k else variants[-1]
            ctx = _sentence(rng, TOPICS[topics[e.id]], 5, 6)
            idx = len(mentions)
            mentions.append(Mention(f"doc{idx:04d}", text, ctx, gold_id=e.id))
            pairs.append(LabeledPair(idx, e.id, 1, "synthetic"))
            pairs.append(LabeledPair(idx, twin, 0, "synthetic"))
            if surface_negatives:
                others = [x for x in by_topic[topics[e.id]] if kb[x].name != e.name]
                if others:
                    pairs.append(LabeledPair(idx, others[int(rng.integers(len(others)))], 0, "synthetic"))
    return Corpus(kb, mentions, pairs, topics)


def disjoint_topic_corpus(n_entities: int = 20, words_per_entity: int = 8, dim: int = 50,
                          seed: int = 7) -> tuple[KnowledgeBase, WordVectors]:
    """Entities whose descriptions use private vocabularies, plus matching word vectors."""
    vocab = {f"t{i:02d}": tuple(f"t{i:02d}w{j:02d}" for j in range(words_per_entity))
             for i in range(n_entities)}
    wv = synthetic_word_vectors(dim=dim, seed=seed, topics=vocab, filler=())
    rng = make_rng(seed + 1)
    entities = []
    for i, (topic, words) in enumerate(vocab.items()):
        desc = " ".join(rng.choice(words, size=2 * words_per_entity))
        entities.append(Entity(f"D{i:02d}", f"entity {topic}", (), desc))
    return KnowledgeBase(entities), wv
