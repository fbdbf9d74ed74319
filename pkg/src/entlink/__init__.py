"""Entity linking: fuzzy blocking, surface and semantic encoders, and a trained pair scorer."""
from .blocking import BlockingConfig, candidates, candidates_batch
from .core import (CandidatePair, Entity, KnowledgeBase, LinkDecision, Mention, load_entities,
                   load_mentions, normalize)
from .metrics import confusion, prf, roc_auc
from .model import EntityLinker
from .similarity import cosine_sim, fuzzy_score, jaro_sim, levenshtein_sim
from .vectors import WordVectors, load_word_vectors

__version__ = "0.1.0"
