"""Versioned JSON checkpoints holding every layer of a trained linker."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import replace
from pathlib import Path

from .config import PipelineConfig
from .errors import VersionMismatch
from .model import EntityLinker
from .nn import RNG_ALGORITHM
from .scorer import Scorer
from .semantic import BagOfEmbeddings, ContextEncoder, TripletEntityEncoder, read_precomputed
from .surface import SurfaceEncoder
from .vectors import WordVectors, read_word_vectors

FORMAT = "entlink-checkpoint"
VERSION = 1


def checkpoint_document(model: EntityLinker, config: PipelineConfig, extra: dict | None = None) -> dict:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "rng": RNG_ALGORITHM,
        "seed": config.seed,
        # the file's own location is left out so the bytes do not depend on it
        "config": replace(config, checkpoint=None).to_dict(),
        "context_encoder": {"kind": getattr(model.context_encoder, "kind", "custom"),
                            "dim": model.context_encoder.dim},
        "surface": model.surface.to_dict(),
        "entity_encoder": model.entity_encoder.to_dict(),
        "scorer": model.scorer.to_dict(),
    }
    if extra:
        doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    # repr-exact floats and sorted keys: identical models give identical bytes
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_checkpoint(path, model: EntityLinker, config: PipelineConfig, extra: dict | None = None) -> None:
    atomic_write(path, dumps(checkpoint_document(model, config, extra)))


def model_from_document(doc: dict, wv: WordVectors, context_encoder: ContextEncoder | None = None) -> EntityLinker:
    if doc.get("format") != FORMAT:
        raise VersionMismatch(f"not a checkpoint (format {doc.get('format')!r})")
    if doc.get("version") != VERSION:
        raise VersionMismatch(f"checkpoint version {doc.get('version')!r}, expected {VERSION}")
    if context_encoder is None:
        kind = doc["context_encoder"]["kind"]
        if kind == BagOfEmbeddings.kind:
            context_encoder = BagOfEmbeddings(wv)
        elif kind == "precomputed":
            context_encoder = read_precomputed(doc["config"]["context_vectors"])
        else:
            raise ValueError(f"checkpoint uses context encoder {kind!r}; pass one explicitly")
    if context_encoder.dim != doc["context_encoder"]["dim"]:
        raise ValueError("context encoder dimension differs from the checkpoint")
    return EntityLinker(
        SurfaceEncoder.from_dict(doc["surface"]),
        context_encoder,
        TripletEntityEncoder.from_dict(doc["entity_encoder"], wv),
        Scorer.from_dict(doc["scorer"]),
    )


def load_checkpoint(path, wv: WordVectors | None = None,
                    context_encoder: ContextEncoder | None = None) -> tuple[EntityLinker, PipelineConfig]:
    """Rebuild the model; word vectors default to the path echoed in the checkpoint config."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    config = PipelineConfig.from_dict(doc["config"])
    if wv is None:
        if not config.vectors:
            raise ValueError("checkpoint does not name a word-vector file; pass one explicitly")
        wv = read_word_vectors(config.vectors)
    return model_from_document(doc, wv, context_encoder), config
