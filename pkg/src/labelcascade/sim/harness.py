"""End-to-end simulation: synthetic pool, real pipeline, truth-based scoring.

The harness wires a generated pool with hidden ground truth into the real
store, service, crowd machinery, and cascade engine, then measures the
run's precision, recall, and amplification against the truth it kept
aside. Every byte of output is determined by the config seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from labelcascade.cascade.engine import CascadeEngine
from labelcascade.clock import SimClock
from labelcascade.crowd.gold import ROLE_HIDDEN, ROLE_ONLINE, ROLE_TUTORIAL, GoldItem, GoldPools
from labelcascade.pool.journal import Journal
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import CategorySpec, ItemState
from labelcascade.seeding import derive_seed
from labelcascade.sim.config import SimConfig
from labelcascade.sim.oracle import OracleScorerBackend
from labelcascade.sim.workers import SimulatedCrowd, build_workers
from labelcascade.svc.service import LabelingService, ServiceConfig


@dataclass
class GeneratedPool:
    rows: list[dict]
    truth: dict[str, bool]
    difficulty: dict[str, float]
    gold: GoldPools
    gold_truth: dict[str, bool]


def gen_pool(config: SimConfig) -> GeneratedPool:
    """Synthesize manifest rows with hidden truths plus the gold pools.

    The first feature carries the class signal scaled by easiness; the rest
    is per-item noise that keeps feature vectors distinct. Gold items live
    in the same id space as pool items so nothing in a payload gives them
    away.
    """
    rng = np.random.default_rng(derive_seed(config.seed, "pool"))
    n = config.pool_size
    truths = rng.random(n) < config.prevalence
    difficulties = np.clip(
        rng.beta(config.difficulty_alpha, config.difficulty_beta, size=n), 0.0, 0.999
    )
    jitter = rng.uniform(-1.0, 1.0, size=(n, 2))
    rows = []
    truth: dict[str, bool] = {}
    difficulty: dict[str, float] = {}
    for index in range(n):
        item_id = f"i-{index:08d}"
        y = bool(truths[index])
        d = float(difficulties[index])
        signal = (1.0 if y else -1.0) * (1.0 - d)
        rows.append(
            {
                "id": item_id,
                "url": f"https://img.example/{config.category}/{index:08d}.jpg",
                "width": 512,
                "height": 384,
                "category": config.category,
                "features": [signal, float(jitter[index, 0]), float(jitter[index, 1])],
            }
        )
        truth[item_id] = y
        difficulty[item_id] = d

    gold = GoldPools()
    gold_truth: dict[str, bool] = {}
    gold_rng = np.random.default_rng(derive_seed(config.seed, "gold"))
    per_role = config.gold_pool_size
    offset = n
    for role in (ROLE_TUTORIAL, ROLE_ONLINE, ROLE_HIDDEN):
        for j in range(per_role):
            item_id = f"i-{offset:08d}"
            offset += 1
            is_yes = bool(gold_rng.random() < config.gold_yes_fraction)
            gold.add(
                GoldItem(
                    item_id=item_id,
                    truth=is_yes,
                    role=role,
                    url=f"https://img.example/{config.category}/{item_id[2:]}.jpg",
                    explanation=(
                        f"The image {'shows' if is_yes else 'does not show'} a "
                        f"{config.category}; check the whole frame before answering."
                        if role == ROLE_TUTORIAL
                        else ""
                    ),
                )
            )
            gold_truth[item_id] = is_yes
    return GeneratedPool(rows=rows, truth=truth, difficulty=difficulty, gold=gold,
                         gold_truth=gold_truth)


@dataclass
class SimResult:
    final_precision: float | None
    final_recall: float
    amplification: float | None
    iterations_used: int
    total_items: int
    truth_positives: int
    human_positive: int
    human_negative: int
    auto_positive: int
    auto_negative: int
    unresolved: int
    human_labeled_items: int
    true_positives_auto_rejected: int
    auto_rejected_fraction: float
    spammer_submissions: int
    spammer_accepted: int
    honest_submissions: int
    honest_accepted: int

    def as_dict(self) -> dict:
        return {
            "final_precision": self.final_precision,
            "final_recall": self.final_recall,
            "amplification": self.amplification,
            "iterations_used": self.iterations_used,
            "total_items": self.total_items,
            "truth_positives": self.truth_positives,
            "human_positive": self.human_positive,
            "human_negative": self.human_negative,
            "auto_positive": self.auto_positive,
            "auto_negative": self.auto_negative,
            "unresolved": self.unresolved,
            "human_labeled_items": self.human_labeled_items,
            "true_positives_auto_rejected": self.true_positives_auto_rejected,
            "auto_rejected_fraction": self.auto_rejected_fraction,
            "spammer_submissions": self.spammer_submissions,
            "spammer_accepted": self.spammer_accepted,
            "honest_submissions": self.honest_submissions,
            "honest_accepted": self.honest_accepted,
        }


@dataclass
class SimRun:
    """Everything a test might want to poke at after a run."""

    result: SimResult
    store: PoolStore
    service: LabelingService
    engine: CascadeEngine
    truth: dict[str, bool]
    outdir: Path


def run_simulation(config: SimConfig, outdir: str | Path) -> SimRun:
    """Run the full pipeline on a synthetic pool; write artifacts to outdir.

    Artifacts: journal.jsonl (event log), runlog.jsonl (one line per
    iteration), export.jsonl (final labels), result.json (truth-based
    summary). Two runs with the same config produce identical bytes.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    clock = SimClock(start=0)
    journal = Journal(outdir / "journal.jsonl", flush_each=False)
    store = PoolStore(journal=journal, clock=clock)

    generated = gen_pool(config)
    ingest = store.ingest_manifest(generated.rows, category=config.category)
    if ingest.accepted != config.pool_size:
        raise AssertionError(f"pool generation lost rows: {ingest}")

    category_spec = CategorySpec(
        name=config.category,
        kind="scene",
        definition_text=f"An image that clearly depicts a {config.category}.",
    )
    service = LabelingService(
        store,
        ServiceConfig(seed=derive_seed(config.seed, "service")),
        clock=clock,
    )
    service.register_category(category_spec, generated.gold)

    truth_all = dict(generated.truth)
    truth_all.update(generated.gold_truth)
    workers = build_workers(config)
    crowd = SimulatedCrowd(
        service,
        workers,
        clock,
        truth_of=lambda item_id: truth_all[item_id],
        seed=derive_seed(config.seed, "crowd"),
    )
    scorer = OracleScorerBackend(config.skill, sigma=config.noise_sigma)
    engine = CascadeEngine(
        store,
        scorer,
        crowd,
        config.cascade,
        category=config.category,
        run_log_path=outdir / "runlog.jsonl",
    )
    reports = engine.run()
    for report in reports:
        service.record_thresholds(config.category, report.iteration, report.thresholds.as_dict())

    result = _score_run(config, store, service, crowd, generated.truth, len(reports))
    store.export_to(outdir / "export.jsonl")
    with open(outdir / "result.json", "w", encoding="utf-8") as fh:
        json.dump(result.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    journal.close()
    return SimRun(
        result=result,
        store=store,
        service=service,
        engine=engine,
        truth=generated.truth,
        outdir=outdir,
    )


def _score_run(
    config: SimConfig,
    store: PoolStore,
    service: LabelingService,
    crowd: SimulatedCrowd,
    truth: dict[str, bool],
    iterations: int,
) -> SimResult:
    human_pos = store.ids_in(ItemState.HUMAN_POSITIVE)
    auto_pos = store.ids_in(ItemState.AUTO_POSITIVE)
    human_neg = store.ids_in(ItemState.HUMAN_NEGATIVE)
    auto_neg = store.ids_in(ItemState.AUTO_NEGATIVE)
    positives = human_pos + auto_pos
    truth_positives = sum(1 for v in truth.values() if v)
    true_in_positives = sum(1 for item_id in positives if truth[item_id])
    precision = true_in_positives / len(positives) if positives else None
    recall = true_in_positives / truth_positives if truth_positives else 0.0
    auto_rejected_true = sum(1 for item_id in auto_neg if truth[item_id])

    resolved = len(positives) + len(human_neg) + len(auto_neg)
    human_labeled = service.human_labeled_count(config.category)
    amplification = resolved / human_labeled if human_labeled else None

    spammer_ids = {w.worker_id for w in crowd.workers if w.is_spammer}
    spam_sub = sum(crowd.worker_stats[w]["submitted"] for w in spammer_ids)
    spam_acc = sum(crowd.worker_stats[w]["accepted"] for w in spammer_ids)
    honest_sub = sum(
        stats["submitted"] for w, stats in crowd.worker_stats.items() if w not in spammer_ids
    )
    honest_acc = sum(
        stats["accepted"] for w, stats in crowd.worker_stats.items() if w not in spammer_ids
    )

    return SimResult(
        final_precision=precision,
        final_recall=recall,
        amplification=amplification,
        iterations_used=iterations,
        total_items=len(truth),
        truth_positives=truth_positives,
        human_positive=len(human_pos),
        human_negative=len(human_neg),
        auto_positive=len(auto_pos),
        auto_negative=len(auto_neg),
        unresolved=store.count(ItemState.UNLABELED),
        human_labeled_items=human_labeled,
        true_positives_auto_rejected=auto_rejected_true,
        auto_rejected_fraction=(
            auto_rejected_true / truth_positives if truth_positives else 0.0
        ),
        spammer_submissions=spam_sub,
        spammer_accepted=spam_acc,
        honest_submissions=honest_sub,
        honest_accepted=honest_acc,
    )
