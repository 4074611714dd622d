"""Cascade run configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from labelcascade.errors import InvalidArgumentError


@dataclass(frozen=True)
class CascadeConfig:
    """Knobs for one category's labeling run.

    Defaults are the production-scale numbers; desk-scale runs shrink
    batch/test/val proportionally.
    """

    batch_size: int = 40_000
    test_size: int = 10_000
    val_size: int = 5_000
    precision_target: float = 0.95
    loss_budget: float = 0.01
    min_test_positives: int = 10
    exhaustive_limit: int = 2_000
    max_iterations: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.test_size + self.val_size >= self.batch_size:
            raise InvalidArgumentError("test_size + val_size must be smaller than batch_size")
        if not 0.0 < self.precision_target <= 1.0:
            raise InvalidArgumentError("precision_target must be in (0, 1]")
        if not 0.0 <= self.loss_budget < 1.0:
            raise InvalidArgumentError("loss_budget must be in [0, 1)")
        if self.exhaustive_limit < 0 or self.max_iterations < 1:
            raise InvalidArgumentError("exhaustive_limit >= 0 and max_iterations >= 1 required")

    @property
    def train_size(self) -> int:
        return self.batch_size - self.test_size - self.val_size

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def load_cascade_config(path: str | Path) -> CascadeConfig:
    """Read a config file (JSON object); missing fields keep their defaults."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise InvalidArgumentError(f"{path} does not hold a config object")
    known = {f.name for f in fields(CascadeConfig)}
    unknown = set(raw) - known
    if unknown:
        raise InvalidArgumentError(f"unknown cascade config fields: {sorted(unknown)}")
    return CascadeConfig(**raw)
