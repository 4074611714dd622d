"""Simulation configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from labelcascade.cascade.config import CascadeConfig
from labelcascade.errors import InvalidArgumentError


@dataclass(frozen=True)
class SkillCurve:
    """Scorer separation as a function of training-set size.

    skill(n) = s0 + k * ln(1 + n / n0): later iterations see more training
    data and separate classes better, bounded noise keeps bands nontrivial.
    """

    s0: float = 1.0
    k: float = 1.2
    n0: float = 500.0

    def skill(self, n_train: int) -> float:
        import math

        return self.s0 + self.k * math.log1p(n_train / self.n0)


@dataclass(frozen=True)
class SimConfig:
    pool_size: int = 20_000
    prevalence: float = 0.3
    difficulty_alpha: float = 2.0
    difficulty_beta: float = 5.0
    worker_count: int = 20
    worker_flip_low: float = 0.05
    worker_flip_high: float = 0.05
    spammer_fraction: float = 0.1
    skill: SkillCurve = field(default_factory=SkillCurve)
    noise_sigma: float = 1.0
    gold_pool_size: int = 200
    gold_yes_fraction: float = 0.5
    category: str = "kitchen"
    seed: int = 0
    cascade: CascadeConfig = field(default_factory=CascadeConfig)

    def __post_init__(self):
        for name in ("prevalence", "spammer_fraction", "gold_yes_fraction",
                     "worker_flip_low", "worker_flip_high"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidArgumentError(f"{name} must be in [0, 1], got {value}")
        # 1.0 is allowed for degenerate single-class test pools
        if self.prevalence == 0.0:
            raise InvalidArgumentError("prevalence must be positive")
        if self.worker_flip_low > self.worker_flip_high:
            raise InvalidArgumentError("worker_flip_low must not exceed worker_flip_high")
        if self.pool_size < 1 or self.worker_count < 1:
            raise InvalidArgumentError("pool_size and worker_count must be positive")
        if self.gold_pool_size < 60:
            raise InvalidArgumentError("gold_pool_size must be at least 60 (15+20+20 plus slack)")


def load_sim_config(path: str | Path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise InvalidArgumentError(f"{path} does not hold a config object")
    known = {f.name for f in fields(SimConfig)}
    unknown = set(raw) - known
    if unknown:
        raise InvalidArgumentError(f"unknown sim config fields: {sorted(unknown)}")
    if "skill" in raw:
        raw["skill"] = SkillCurve(**raw["skill"])
    if "cascade" in raw:
        raw["cascade"] = CascadeConfig(**raw["cascade"])
    return SimConfig(**raw)
