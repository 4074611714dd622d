"""Skill-curve scorer oracle.

Stands in for a trained classifier during simulation: the score of an item
is a sigmoid of (skill * signal + sigma * noise), where the signal feature
encodes how separable the item really is and the noise is a deterministic
function of the feature vector and the model's noise seed. Scoring is
therefore pure and repeatable, yet two models trained at different
iterations see fresh noise, and more training data means cleaner
separation.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Sequence

from labelcascade.errors import DegenerateDataError, InvalidArgumentError
from labelcascade.scorer.logistic import LabeledExample
from labelcascade.sim.config import SkillCurve

_TWO_PI = 2.0 * math.pi


def _stable_gauss(features: Sequence[float], noise_seed: int) -> float:
    """Standard normal draw determined by the features and the seed."""
    packed = struct.pack(f"<Q{len(features)}d", noise_seed & (2**64 - 1), *features)
    digest = hashlib.blake2b(packed, digest_size=16).digest()
    a = int.from_bytes(digest[:8], "little")
    b = int.from_bytes(digest[8:], "little")
    u1 = (a + 1) / (2**64 + 1)  # in (0, 1)
    u2 = b / 2**64
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class OracleModel:
    """One 'trained' oracle; skill frozen at train time."""

    skill: float
    sigma: float
    noise_seed: int

    def score(self, features: Sequence[float]) -> float:
        if not features:
            raise InvalidArgumentError("empty feature vector")
        signal = features[0]
        noise = _stable_gauss(features, self.noise_seed) if self.sigma > 0 else 0.0
        return _sigmoid(self.skill * signal + self.sigma * noise)

    def score_batch(self, rows: Sequence[Sequence[float]]) -> list[float]:
        return [self.score(row) for row in rows]


class OracleScorerBackend:
    """Scorer backend for the cascade engine; one candidate per iteration."""

    def __init__(self, curve: SkillCurve, sigma: float = 1.0):
        self.curve = curve
        self.sigma = sigma

    def train_candidates(
        self, train: Sequence[LabeledExample], iteration: int, seed: int
    ) -> list[OracleModel]:
        if not train:
            raise InvalidArgumentError("oracle cannot train on an empty set")
        labels = {ex.label for ex in train}
        if len(labels) < 2:
            raise DegenerateDataError("training set contains a single class")
        return [
            OracleModel(skill=self.curve.skill(len(train)), sigma=self.sigma, noise_seed=seed)
        ]
