"""Engine-facing backend that trains reference logistic candidates.

Produces a small family of candidates per iteration (different epoch
budgets at a step size safely under the stability bound); the selection
rule picks whichever removes more test items.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from labelcascade.scorer.logistic import (
    LabeledExample,
    LogisticModel,
    TrainConfig,
    stable_learning_rate,
    train_reference,
)


class ReferenceScorerBackend:
    def __init__(self, epoch_choices: Sequence[int] = (150, 400), l2_lambda: float = 1e-3):
        self.epoch_choices = tuple(epoch_choices)
        self.l2_lambda = l2_lambda

    def train_candidates(
        self, train: Sequence[LabeledExample], iteration: int, seed: int
    ) -> list[LogisticModel]:
        X = np.array([ex.features for ex in train], dtype=np.float64)
        rate = 0.9 * stable_learning_rate(X, self.l2_lambda)
        return [
            train_reference(
                train,
                TrainConfig(
                    learning_rate=rate, epochs=epochs, l2_lambda=self.l2_lambda, seed=seed
                ),
            )
            for epochs in self.epoch_choices
        ]
