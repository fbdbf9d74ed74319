"""Pipeline configuration: every numeric default in one place, JSON round-trippable."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from .scorer import ScorerConfig
from .surface import SurfaceConfig
from .trainer import HIGH_CONFIDENCE, LOW_CONFIDENCE, TrainConfig

LABEL_MODES = ("auto", "gold", "weak")


@dataclass(frozen=True)
class TripletConfig:
    per_entity: int = 5
    epochs: int = 200
    lr: float = 0.01
    batch_size: int = 1


@dataclass(frozen=True)
class PipelineConfig:
    blocking_threshold: float = 0.5
    high_confidence: float = HIGH_CONFIDENCE
    low_confidence: float = LOW_CONFIDENCE
    weak_tier: str = "high_confidence"
    labels: str = "auto"
    seed: int = 42
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    triplet: TripletConfig = field(default_factory=TripletConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    entities: str | None = None
    mentions: str | None = None
    vectors: str | None = None
    context_vectors: str | None = None
    checkpoint: str | None = None

    def __post_init__(self):
        if self.labels not in LABEL_MODES:
            raise ValueError(f"labels must be one of {LABEL_MODES}")
        if self.weak_tier not in ("high_confidence", "low_confidence"):
            raise ValueError("weak_tier must be high_confidence or low_confidence")
        if not 0.0 <= self.blocking_threshold <= 1.0:
            raise ValueError("blocking_threshold must lie in [0, 1]")

    @property
    def weak_threshold(self) -> float:
        return self.high_confidence if self.weak_tier == "high_confidence" else self.low_confidence

    @property
    def train_config(self) -> TrainConfig:
        return replace(self.train, seed=self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        nested = {"surface": SurfaceConfig, "scorer": ScorerConfig,
                  "triplet": TripletConfig, "train": TrainConfig}
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for k, v in d.items():
            if k in nested:
                sub_known = {f.name for f in fields(nested[k])}
                bad = set(v) - sub_known
                if bad:
                    raise ValueError(f"unknown keys in {k!r}: {sorted(bad)}")
                kwargs[k] = nested[k](**v)
            else:
                kwargs[k] = v
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
