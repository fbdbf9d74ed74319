"""Command-line entry point: ``entlink {block,train,link,eval,fixtures}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import fixtures, pipeline
from .checkpoint import atomic_write, load_checkpoint, save_checkpoint
from .config import PipelineConfig
from .core import FORMAT_VERSION, dump_entities, dump_mentions, dump_records, read_entities, read_mentions
from .errors import EntityLinkError, MalformedRecord, VersionMismatch
from .metrics import format_table
from .semantic import read_precomputed
from .trainer import LabeledPair
from .vectors import dump_word_vectors, read_word_vectors

log = logging.getLogger("entlink")


def _header(kind: str, cfg: PipelineConfig) -> dict:
    return {"version": FORMAT_VERSION, "kind": kind, "config": cfg.to_dict()}


def _emit(path, kind, cfg, records) -> None:
    text = dump_records([_header(kind, cfg), *records])
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _require(value, flag):
    if not value:
        raise SystemExit(f"entlink: error: {flag} is required")
    return value


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
    overrides = {}
    for name in ("entities", "mentions", "vectors", "context_vectors", "checkpoint"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.threshold is not None:
        overrides["blocking_threshold"] = args.threshold
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "labels", None):
        overrides["labels"] = args.labels
    if getattr(args, "epochs", None) is not None:
        overrides["train"] = replace(cfg.train, epochs=args.epochs)
    if args.linear_head:
        overrides["scorer"] = replace(cfg.scorer, linear_head=True)
    return replace(cfg, **overrides)


def read_pairs(path) -> list[tuple[LabeledPair, str | None]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(lineno, exc.msg) from None
            if "kind" in rec and "version" in rec:
                if rec["version"] != FORMAT_VERSION:
                    raise VersionMismatch(f"pairs file version {rec['version']!r}")
                continue
            try:
                pair = LabeledPair(int(rec["mention_index"]), rec["entity_id"], int(rec["label"]),
                                   rec.get("tier", "gold"))
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedRecord(lineno, str(exc)) from None
            out.append((pair, rec.get("split")))
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_block(args) -> int:
    cfg = _config(args)
    kb = read_entities(_require(cfg.entities, "--entities"))
    mentions = read_mentions(_require(cfg.mentions, "--mentions"))
    records = []
    for m, cands in zip(mentions, pipeline.block(mentions, kb, cfg)):
        for c in cands:
            records.append({"mention_index": c.mention_index, "doc_id": m.doc_id, "text": m.text,
                            "entity_id": c.entity_id, "fuzzy_score": c.fuzzy_score,
                            "surface": c.surface})
    _emit(args.output, "candidates", cfg, records)
    log.info("%d candidates for %d mentions", len(records), len(mentions))
    return 0


def cmd_train(args) -> int:
    cfg = _config(args)
    kb = read_entities(_require(cfg.entities, "--entities"))
    mentions = read_mentions(_require(cfg.mentions, "--mentions"))
    wv = read_word_vectors(_require(cfg.vectors, "--vectors"))
    out = _require(cfg.checkpoint, "--checkpoint")
    ctx = read_precomputed(cfg.context_vectors) if cfg.context_vectors else None
    result = pipeline.train(kb, mentions, wv, cfg, test_fraction=args.test_fraction, context_encoder=ctx)
    last = result.history[-1] if result.history else {}
    save_checkpoint(out, result.model, cfg, {
        "triplet_history": result.triplet_history,
        "history": result.history,
    })
    if args.pairs_out:
        recs = [dict(p.to_record(), split="train") for p in result.train_pairs]
        recs += [dict(p.to_record(), split="test") for p in result.test_pairs]
        _emit(args.pairs_out, "labeled_pairs", cfg, recs)
    log.info("wrote %s (final loss %.4f, accuracy %.4f)", out, last.get("loss", float("nan")),
             last.get("accuracy", float("nan")))
    return 0


def _load_model(cfg: PipelineConfig):
    wv = read_word_vectors(cfg.vectors) if cfg.vectors else None
    ctx = read_precomputed(cfg.context_vectors) if cfg.context_vectors else None
    model, trained_cfg = load_checkpoint(_require(cfg.checkpoint, "--checkpoint"), wv, ctx)
    return model, trained_cfg


def _merge_paths(cfg: PipelineConfig, trained: PipelineConfig) -> PipelineConfig:
    """Fill paths missing on the command line from the checkpoint's config echo."""
    return replace(cfg, vectors=cfg.vectors or trained.vectors,
                   context_vectors=cfg.context_vectors or trained.context_vectors)


def cmd_link(args) -> int:
    cfg = _config(args)
    model, trained = _load_model(cfg)
    cfg = _merge_paths(cfg, trained)
    kb = read_entities(_require(cfg.entities, "--entities"))
    mentions = read_mentions(_require(cfg.mentions, "--mentions"))
    records = []
    for m, d in zip(mentions, pipeline.link(model, mentions, kb, cfg)):
        rec = {"mention_index": d.mention_index, "doc_id": m.doc_id, "text": m.text,
               "entity_id": d.entity_id, "score": d.score, "linked": d.linked}
        if args.explain:
            rec["n_candidates"] = len(d.candidates)
            rec["candidates"] = [{"entity_id": eid, "fuzzy_score": fz, "score": s}
                                 for eid, fz, s in d.candidates]
        records.append(rec)
    _emit(args.output, "decisions", cfg, records)
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    model, trained = _load_model(cfg)
    cfg = _merge_paths(cfg, trained)
    kb = read_entities(_require(cfg.entities, "--entities"))
    mentions = read_mentions(_require(cfg.mentions, "--mentions"))
    pairs = [p for p, split in read_pairs(_require(args.pairs, "--pairs"))
             if args.split is None or split == args.split]
    for p in pairs:
        if p.entity_id not in kb:
            raise EntityLinkError(f"pair references unknown entity {p.entity_id!r}")
        if not 0 <= p.mention_index < len(mentions):
            raise EntityLinkError(f"pair references unknown mention {p.mention_index}")
    rep = pipeline.evaluate(model, pairs, mentions, kb)
    print(format_table(rep))
    if args.output:
        atomic_write(args.output, json.dumps({**_header("metrics", cfg), "metrics": rep},
                                             sort_keys=True, indent=1) + "\n")
    return 0


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    wv = fixtures.synthetic_word_vectors(seed=args.seed if args.seed is not None else 42)
    corpora = {
        "demo": fixtures.demo_corpus(),
        "david_davis": fixtures.david_davis(),
        "christopher_nolan": fixtures.christopher_nolan(),
    }
    topics = fixtures.topic_corpus(seed=args.seed if args.seed is not None else 42)
    corpora["topics"] = (topics.kb, topics.mentions)
    for name, (kb, mentions) in corpora.items():
        d = out / name
        d.mkdir(parents=True, exist_ok=True)
        (d / "entities.jsonl").write_text(dump_entities(kb), encoding="utf-8")
        (d / "mentions.jsonl").write_text(dump_mentions(mentions), encoding="utf-8")
    (out / "topics" / "pairs.jsonl").write_text(
        dump_records(p.to_record() for p in topics.pairs), encoding="utf-8")
    (out / "vectors.txt").write_text(dump_word_vectors(wv), encoding="utf-8")
    log.info("wrote fixtures to %s", out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--entities", metavar="PATH")
    common.add_argument("--mentions", metavar="PATH")
    common.add_argument("--vectors", metavar="PATH", help="word vectors, word2vec text format")
    common.add_argument("--context-vectors", metavar="PATH",
                        help="precomputed mention context vectors (key<TAB>values)")
    common.add_argument("--checkpoint", metavar="PATH")
    common.add_argument("--threshold", type=float, help="blocking threshold (default 0.5)")
    common.add_argument("--seed", type=int)
    common.add_argument("--linear-head", action="store_true",
                        help="no nonlinearity between the two comparison layers")
    common.add_argument("--config", metavar="PATH", help="JSON PipelineConfig; flags override it")
    common.add_argument("-o", "--output", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="entlink", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("block", parents=[common], help="fuzzy-match blocking")
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("train", parents=[common], help="train and write a checkpoint")
    p.add_argument("--labels", choices=("auto", "gold", "weak"))
    p.add_argument("--epochs", type=int)
    p.add_argument("--test-fraction", type=float)
    p.add_argument("--pairs-out", metavar="PATH", help="export the labeled pairs used")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("link", parents=[common], help="link mentions with a trained checkpoint")
    p.add_argument("--explain", action="store_true", help="include per-candidate scores")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("eval", parents=[common], help="score labeled pairs and report metrics")
    p.add_argument("--pairs", metavar="PATH", required=True)
    p.add_argument("--split", choices=("train", "test"))
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fixtures", parents=[common], help="write the built-in demo corpora")
    p.add_argument("--out", metavar="DIR", required=True)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (EntityLinkError, ValueError, KeyError, OSError) as exc:
        print(f"entlink: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
