"""Domain records (entities, mentions, candidates, decisions) and JSONL ingestion."""
from __future__ import annotations

import json
import re
import string
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DuplicateId, EmptyMentionText, EmptyName, MalformedRecord, VersionMismatch

FORMAT_VERSION = 1

_WS = re.compile(r"\s+")
_PUNCT = string.punctuation + "‘’“”…"


def normalize(text: str) -> str:
    """NFC, lowercase, collapse whitespace runs to one space, strip."""
    text = unicodedata.normalize("NFC", text).lower()
    # lowercasing can denormalize a few code points
    text = unicodedata.normalize("NFC", text)
    return _WS.sub(" ", text).strip()


def tokenize(text: str) -> list[str]:
    """Whitespace tokens of normalized text with surrounding punctuation removed."""
    out = []
    for tok in normalize(text).split(" "):
        tok = tok.strip(_PUNCT)
        if tok:
            out.append(tok)
    return out


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    aliases: tuple[str, ...] = ()
    description: str = ""

    @property
    def surfaces(self) -> tuple[str, ...]:
        """Canonical name followed by the aliases, duplicates removed."""
        seen = dict.fromkeys((self.name,) + self.aliases)
        return tuple(seen)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "aliases": list(self.aliases),
            "description": self.description,
        }


@dataclass(frozen=True)
class Mention:
    doc_id: str
    text: str
    context: str = ""
    gold_id: str | None = None

    @property
    def key(self) -> str:
        return f"{self.doc_id}#{self.text}"

    def to_record(self) -> dict:
        rec = {"doc_id": self.doc_id, "text": self.text, "context": self.context}
        if self.gold_id is not None:
            rec["gold_id"] = self.gold_id
        return rec


class KnowledgeBase:
    """Insertion-ordered, immutable collection of entities keyed by id."""

    def __init__(self, entities: Iterable[Entity] = ()):
        by_id: dict[str, Entity] = {}
        for e in entities:
            if not e.id:
                raise EmptyName(e.id)
            if e.id in by_id:
                raise DuplicateId(e.id)
            if not e.name:
                raise EmptyName(e.id)
            by_id[e.id] = e
        self._by_id = by_id
        self._list = tuple(by_id.values())
        self._cache: dict = {}

    def __len__(self) -> int:
        return len(self._list)

    def __iter__(self) -> Iterator[Entity]:
        return iter(self._list)

    def __getitem__(self, entity_id: str) -> Entity:
        return self._by_id[entity_id]

    def __contains__(self, entity_id: object) -> bool:
        return entity_id in self._by_id

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KnowledgeBase) and self._list == other._list

    def __repr__(self) -> str:
        return f"KnowledgeBase({len(self)} entities)"

    @property
    def entities(self) -> tuple[Entity, ...]:
        return self._list

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self._list]

    def cached(self, key, factory):
        """Memoize derived data (e.g. encoded names) on this immutable KB."""
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]


@dataclass(frozen=True)
class CandidatePair:
    mention_index: int
    entity_id: str
    fuzzy_score: float
    surface: str = ""  # the name or alias that produced fuzzy_score


@dataclass(frozen=True)
class LinkDecision:
    mention_index: int
    entity_id: str | None
    score: float | None
    linked: bool
    candidates: tuple[tuple[str, float, float], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.linked and not (self.score is not None and self.score > 0.5):
            raise ValueError("a linked decision needs score > 0.5")


# ---------------------------------------------------------------------------
# JSONL ingestion


def _iter_json(source: Iterable[str]) -> Iterator[tuple[int, dict]]:
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, exc.msg) from None
        if not isinstance(rec, dict):
            raise MalformedRecord(lineno, "expected a JSON object")
        if "version" in rec and "kind" in rec:
            if rec["version"] != FORMAT_VERSION:
                raise VersionMismatch(
                    f"line {lineno}: file version {rec['version']!r}, expected {FORMAT_VERSION}"
                )
            continue
        yield lineno, rec


def _str_field(rec, key, lineno, default=None, required=False):
    if key not in rec or rec[key] is None:
        if required:
            raise MalformedRecord(lineno, f"missing field {key!r}")
        return default
    value = rec[key]
    if not isinstance(value, str):
        raise MalformedRecord(lineno, f"field {key!r} must be a string")
    return value


def load_entities(source: Iterable[str]) -> KnowledgeBase:
    """Parse JSONL entity records into a KnowledgeBase.

    Each line is ``{"id", "name", "aliases": [...], "description"}``; aliases and
    description are optional. Names, aliases and descriptions are normalized.
    The whole load fails on the first duplicate id.
    """
    entities = []
    seen = set()
    for lineno, rec in _iter_json(source):
        eid = _str_field(rec, "id", lineno, required=True)
        name = normalize(_str_field(rec, "name", lineno, default=""))
        aliases = rec.get("aliases") or []
        if not isinstance(aliases, list) or not all(isinstance(a, str) for a in aliases):
            raise MalformedRecord(lineno, "aliases must be a list of strings")
        desc = normalize(_str_field(rec, "description", lineno, default=""))
        if not eid:
            raise MalformedRecord(lineno, "empty id")
        if eid in seen:
            raise DuplicateId(eid)
        if not name:
            raise EmptyName(eid)
        seen.add(eid)
        norm_aliases = tuple(a for a in dict.fromkeys(normalize(a) for a in aliases) if a)
        entities.append(Entity(eid, name, norm_aliases, desc))
    return KnowledgeBase(entities)


def load_mentions(source: Iterable[str]) -> list[Mention]:
    mentions = []
    for lineno, rec in _iter_json(source):
        text = normalize(_str_field(rec, "text", lineno, default=""))
        if not text:
            raise EmptyMentionText(lineno)
        mentions.append(
            Mention(
                doc_id=_str_field(rec, "doc_id", lineno, default=""),
                text=text,
                context=normalize(_str_field(rec, "context", lineno, default="")),
                gold_id=_str_field(rec, "gold_id", lineno),
            )
        )
    return mentions


def dump_records(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def dump_entities(kb: KnowledgeBase) -> str:
    return dump_records(e.to_record() for e in kb)


def dump_mentions(mentions: Iterable[Mention]) -> str:
    return dump_records(m.to_record() for m in mentions)


def read_entities(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return load_entities(fh)


def read_mentions(path) -> list[Mention]:
    with open(path, encoding="utf-8") as fh:
        return load_mentions(fh)
