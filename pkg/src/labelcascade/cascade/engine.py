"""The iteration engine.

Each sampling iteration: draw a uniform batch from the unlabeled pool, have
the crowd label it, train candidate models on the new training split plus
the carried ambiguous labels, pick the model that removes the most test
items, cut thresholds on the test split, then partition both the unlabeled
pool (auto transitions) and the labeled stream (carry-over) with them. The
run ends with an exhaustive round once the pool is small enough or the
iteration cap is reached.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from labelcascade.cascade.config import CascadeConfig
from labelcascade.cascade.thresholds import (
    ThresholdPair,
    apply_thresholds,
    band_of,
)
from labelcascade.errors import DegenerateDataError, InvalidArgumentError
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import ItemState
from labelcascade.scorer.logistic import LabeledExample
from labelcascade.scorer.metrics import ModelMetrics
from labelcascade.scorer.selection import ScoringModel, select_model
from labelcascade.seeding import derive_seed

logger = logging.getLogger(__name__)

HIT_GROUP = 150  # target group size used to round human batches to whole HITs


class CrowdRunner(Protocol):
    """Source of human labels, live or simulated.

    Returns one entry per requested item: True/False for a consensus label,
    None when the round could not resolve the item.
    """

    def collect_labels(
        self, category: str, item_ids: Sequence[str], iteration: int
    ) -> dict[str, bool | None]: ...


class ScorerBackend(Protocol):
    def train_candidates(
        self, train: Sequence[LabeledExample], iteration: int, seed: int
    ) -> Sequence[ScoringModel]: ...


@dataclass(frozen=True)
class SamplingPlan:
    train: int
    test: int
    val: int

    @property
    def total(self) -> int:
        return self.train + self.test + self.val


@dataclass(frozen=True)
class ExhaustivePlan:
    count: int


def plan_iteration(
    unlabeled: int, config: CascadeConfig, iteration: int
) -> SamplingPlan | ExhaustivePlan:
    """Decide between another sampling round and the terminal exhaustive round.

    Exhaustive when the pool fits the limit or the iteration cap is hit;
    otherwise the configured batch split, scaled proportionally (floor on
    test/val, train absorbing the remainder) when the pool is smaller than
    one batch.
    """
    if unlabeled <= config.exhaustive_limit or iteration >= config.max_iterations:
        return ExhaustivePlan(count=unlabeled)
    if unlabeled >= config.batch_size:
        return SamplingPlan(train=config.train_size, test=config.test_size, val=config.val_size)
    test = config.test_size * unlabeled // config.batch_size
    val = config.val_size * unlabeled // config.batch_size
    return SamplingPlan(train=unlabeled - test - val, test=test, val=val)


def assemble_training_set(
    new_labeled: Mapping[str, bool], carried: Mapping[str, bool]
) -> dict[str, bool]:
    """Union of fresh labels and carried ambiguous labels, deduped by id.

    On a conflicting duplicate the newest label wins and a warning is
    logged.
    """
    merged = dict(carried)
    for item_id, label in new_labeled.items():
        if item_id in merged and merged[item_id] != label:
            logger.warning("conflicting labels for %s; keeping the newest", item_id)
        merged[item_id] = label
    return merged


@dataclass
class IterationReport:
    iteration: int
    kind: str  # "sampling" or "exhaustive"
    sampled: int
    human_positive: int
    human_negative: int
    unresolved: int
    auto_positive: int
    auto_negative: int
    carried_forward: int
    thresholds: ThresholdPair
    model_metrics: ModelMetrics | None
    unlabeled_before: int
    unlabeled_after: int
    warning: str | None = None
    test_scored: tuple[tuple[float, bool], ...] | None = None

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "kind": self.kind,
            "sampled": self.sampled,
            "human_positive": self.human_positive,
            "human_negative": self.human_negative,
            "unresolved": self.unresolved,
            "auto_positive": self.auto_positive,
            "auto_negative": self.auto_negative,
            "carried_forward": self.carried_forward,
            "thresholds": self.thresholds.as_dict(),
            "model_metrics": (
                {
                    "uniform_accuracy": self.model_metrics.uniform_accuracy,
                    "balanced_accuracy": self.model_metrics.balanced_accuracy,
                    "removal_count": self.model_metrics.removal_count,
                }
                if self.model_metrics
                else None
            ),
            "unlabeled_before": self.unlabeled_before,
            "unlabeled_after": self.unlabeled_after,
            "warning": self.warning,
            "test_scored": (
                [[score, bool(truth)] for score, truth in self.test_scored]
                if self.test_scored is not None
                else None
            ),
        }


class CascadeEngine:
    """Drives one category's labeling run over a shared pool store."""

    def __init__(
        self,
        store: PoolStore,
        scorer: ScorerBackend,
        crowd: CrowdRunner,
        config: CascadeConfig,
        category: str,
        run_log_path: str | Path | None = None,
    ):
        self.store = store
        self.scorer = scorer
        self.crowd = crowd
        self.config = config
        self.category = category
        self.run_log_path = Path(run_log_path) if run_log_path else None
        self.reports: list[IterationReport] = []
        self.carried: dict[str, bool] = {}
        self.finished = False
        self.iterations_done = 0

    # -- resumable state --------------------------------------------------------

    def state_dict(self) -> dict:
        """Everything needed to resume stepping in a fresh process."""
        return {
            "category": self.category,
            "iterations_done": self.iterations_done,
            "finished": self.finished,
            "carried": {k: self.carried[k] for k in sorted(self.carried)},
        }

    def load_state(self, state: Mapping) -> None:
        if state.get("category") != self.category:
            raise InvalidArgumentError(
                f"state belongs to category {state.get('category')!r}, not {self.category!r}"
            )
        self.iterations_done = int(state["iterations_done"])
        self.finished = bool(state["finished"])
        self.carried = {k: bool(v) for k, v in state["carried"].items()}

    # -- helpers --------------------------------------------------------------

    def _features_of(self, item_id: str) -> tuple[float, ...]:
        features = self.store.get(item_id).features
        if features is None:
            raise InvalidArgumentError(f"item {item_id} has no features; cannot score")
        return features

    def _examples(self, labels: Mapping[str, bool], ids: Sequence[str]) -> list[LabeledExample]:
        return [
            LabeledExample(item_id=item_id, features=self._features_of(item_id), label=labels[item_id])
            for item_id in ids
            if item_id in labels
        ]

    def _emit(self, report: IterationReport) -> IterationReport:
        self.reports.append(report)
        self.iterations_done = report.iteration
        if self.run_log_path is not None:
            with open(self.run_log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(report.as_dict(), separators=(",", ":")) + "\n")
        return report

    # -- iteration ------------------------------------------------------------

    def step(self) -> IterationReport:
        if self.finished:
            raise InvalidArgumentError("cascade already finished")
        iteration = self.iterations_done + 1
        unlabeled_before = self.store.count(ItemState.UNLABELED)
        plan = plan_iteration(unlabeled_before, self.config, iteration)
        if isinstance(plan, ExhaustivePlan):
            return self._exhaustive_step(iteration, unlabeled_before)
        return self._sampling_step(plan, iteration, unlabeled_before)

    def _exhaustive_step(self, iteration: int, unlabeled_before: int) -> IterationReport:
        ids = self.store.ids_in(ItemState.UNLABELED)
        labels = self.crowd.collect_labels(self.category, ids, iteration) if ids else {}
        human_positive = sum(1 for v in labels.values() if v is True)
        human_negative = sum(1 for v in labels.values() if v is False)
        self.finished = True
        self.carried = {}
        return self._emit(
            IterationReport(
                iteration=iteration,
                kind="exhaustive",
                sampled=len(ids),
                human_positive=human_positive,
                human_negative=human_negative,
                unresolved=len(ids) - human_positive - human_negative,
                auto_positive=0,
                auto_negative=0,
                carried_forward=0,
                thresholds=ThresholdPair(upper=None, lower=None),
                model_metrics=None,
                unlabeled_before=unlabeled_before,
                unlabeled_after=self.store.count(ItemState.UNLABELED),
            )
        )

    def _sampling_step(
        self, plan: SamplingPlan, iteration: int, unlabeled_before: int
    ) -> IterationReport:
        # round the human batch up to whole HIT groups while the pool allows;
        # the extra items join the training split
        batch_n = min(math.ceil(plan.total / HIT_GROUP) * HIT_GROUP, unlabeled_before)
        sample = self.store.sample_uniform(
            batch_n, ItemState.UNLABELED, derive_seed(self.config.seed, "sample", iteration)
        )
        # sampled items must carry features: training and thresholding need them
        for item_id in sample:
            if self.store.get(item_id).features is None:
                raise InvalidArgumentError(
                    f"sampled item {item_id} has no features; cascade iterations require them"
                )
        test_ids = sample[: plan.test]
        val_ids = sample[plan.test : plan.test + plan.val]
        train_ids = sample[plan.test + plan.val :]

        labels = self.crowd.collect_labels(self.category, sample, iteration)
        resolved = {item_id: label for item_id, label in labels.items() if label is not None}
        human_positive = sum(1 for v in resolved.values() if v)
        human_negative = len(resolved) - human_positive

        new_train = {item_id: resolved[item_id] for item_id in train_ids if item_id in resolved}
        training = assemble_training_set(new_train, self.carried)
        training_ids = sorted(training)

        warning = None
        selection = None
        try:
            candidates = self.scorer.train_candidates(
                self._examples(training, training_ids),
                iteration,
                derive_seed(self.config.seed, "train", iteration),
            )
            selection = select_model(
                candidates,
                self._examples(resolved, val_ids),
                self._examples(resolved, test_ids),
                self.config.precision_target,
                self.config.loss_budget,
                self.config.min_test_positives,
            )
        except (DegenerateDataError, InvalidArgumentError) as exc:
            warning = f"humans-only iteration: {exc}"
            logger.warning("iteration %d degraded: %s", iteration, exc)

        if selection is None:
            # keep every labeled item in the stream and touch nothing else
            self.carried = dict(training)
            for item_id in test_ids + val_ids:
                if item_id in resolved:
                    self.carried[item_id] = resolved[item_id]
            return self._emit(
                IterationReport(
                    iteration=iteration,
                    kind="sampling",
                    sampled=len(sample),
                    human_positive=human_positive,
                    human_negative=human_negative,
                    unresolved=len(sample) - len(resolved),
                    auto_positive=0,
                    auto_negative=0,
                    carried_forward=len(self.carried),
                    thresholds=ThresholdPair(upper=None, lower=None),
                    model_metrics=None,
                    unlabeled_before=unlabeled_before,
                    unlabeled_after=self.store.count(ItemState.UNLABELED),
                    warning=warning,
                )
            )

        pair = selection.thresholds
        # auto-label the remaining unlabeled pool
        pool_ids = self.store.ids_in(ItemState.UNLABELED)
        pool_scores = dict(
            zip(
                pool_ids,
                selection.model.score_batch([self._features_of(item_id) for item_id in pool_ids]),
            )
        )
        partition = apply_thresholds(pool_scores, pair)
        self.store.bulk_transition(partition.auto_positive, ItemState.AUTO_POSITIVE, "auto", iteration)
        self.store.bulk_transition(partition.auto_negative, ItemState.AUTO_NEGATIVE, "auto", iteration)

        # carry forward the labeled items the model still finds ambiguous
        labeled_stream = dict(training)
        for item_id in test_ids + val_ids:
            if item_id in resolved:
                labeled_stream[item_id] = resolved[item_id]
        stream_ids = sorted(labeled_stream)
        stream_scores = selection.model.score_batch(
            [self._features_of(item_id) for item_id in stream_ids]
        )
        self.carried = {
            item_id: labeled_stream[item_id]
            for item_id, score in zip(stream_ids, stream_scores)
            if band_of(score, pair) == "ambiguous"
        }

        report = IterationReport(
            iteration=iteration,
            kind="sampling",
            sampled=len(sample),
            human_positive=human_positive,
            human_negative=human_negative,
            unresolved=len(sample) - len(resolved),
            auto_positive=len(partition.auto_positive),
            auto_negative=len(partition.auto_negative),
            carried_forward=len(self.carried),
            thresholds=pair,
            model_metrics=selection.metrics,
            unlabeled_before=unlabeled_before,
            unlabeled_after=self.store.count(ItemState.UNLABELED),
            warning=warning,
            test_scored=selection.scored_test,
        )
        self._check_conservation(report)
        return self._emit(report)

    def _check_conservation(self, report: IterationReport) -> None:
        resolved_by_humans = report.human_positive + report.human_negative
        expected_after = (
            report.unlabeled_before
            - report.auto_positive
            - report.auto_negative
            - resolved_by_humans
        )
        if report.unlabeled_after != expected_after:
            raise AssertionError(
                f"iteration {report.iteration} ledger mismatch: "
                f"unlabeled_after {report.unlabeled_after} != expected {expected_after}"
            )

    def run(self) -> list[IterationReport]:
        while not self.finished:
            self.step()
        return self.reports
