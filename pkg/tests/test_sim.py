from __future__ import annotations

import ast
import math
import random
from pathlib import Path


import labelcascade.sim as sim_package
from labelcascade.cascade.config import CascadeConfig
from labelcascade.sim.config import SimConfig, SkillCurve
from labelcascade.sim.harness import gen_pool, run_simulation
from labelcascade.sim.oracle import OracleModel, OracleScorerBackend
from labelcascade.sim.workers import SimWorker, build_workers, sim_label
from labelcascade.scorer.logistic import LabeledExample


def small_config(**overrides):
    defaults = dict(
        pool_size=2_000,
        prevalence=0.3,
        difficulty_alpha=1.0,
        difficulty_beta=1.0,
        worker_count=8,
        spammer_fraction=0.125,
        skill=SkillCurve(s0=0.8, k=2.0, n0=300),
        noise_sigma=0.35,
        seed=11,
        cascade=CascadeConfig(
            batch_size=450, test_size=120, val_size=60, exhaustive_limit=250,
            max_iterations=6, seed=11,
        ),
    )
    defaults.update(overrides)
    return SimConfig(**defaults)


# -- pool generation -------------------------------------------------------------


def test_prevalence_one_gives_all_positive():
    generated = gen_pool(small_config(prevalence=1.0))
    assert all(generated.truth.values())


def test_prevalence_tracks_binomial_bound():
    config = small_config(pool_size=100_000)
    generated = gen_pool(config)
    n = config.pool_size
    fraction = sum(generated.truth.values()) / n
    sigma = math.sqrt(0.3 * 0.7 / n)
    assert abs(fraction - 0.3) <= 3 * sigma


def test_same_seed_identical_pools():
    first = gen_pool(small_config())
    second = gen_pool(small_config())
    assert first.rows == second.rows
    assert first.truth == second.truth
    assert [g.item_id for g in first.gold.hidden] == [g.item_id for g in second.gold.hidden]


def test_gold_ids_look_like_item_ids():
    generated = gen_pool(small_config())
    pool_shape = {len(row["id"]) for row in generated.rows}
    for pool in (generated.gold.tutorial, generated.gold.online, generated.gold.hidden):
        for g in pool:
            assert g.item_id.startswith("i-")
            assert len(g.item_id) in pool_shape


# -- worker models ----------------------------------------------------------------


def test_flip_prob_zero_always_truth():
    worker = SimWorker("w", flip_prob=0.0, is_spammer=False)
    rng = random.Random(0)
    assert all(sim_label(worker, True, rng) for _ in range(50))
    assert not any(sim_label(worker, False, rng) for _ in range(50))


def test_spammer_always_no():
    worker = SimWorker("s", flip_prob=0.0, is_spammer=True)
    rng = random.Random(0)
    assert not sim_label(worker, True, rng)
    assert not sim_label(worker, False, rng)


def test_flip_rate_monte_carlo():
    worker = SimWorker("w", flip_prob=0.05, is_spammer=False)
    rng = random.Random(123)
    trials = 10_000
    flips = sum(1 for _ in range(trials) if not sim_label(worker, True, rng))
    assert abs(flips / trials - 0.05) <= 0.01


def test_worker_pool_spammer_share():
    workers = build_workers(small_config(worker_count=20, spammer_fraction=0.1))
    assert sum(1 for w in workers if w.is_spammer) == 2
    assert len(workers) == 20


# -- oracle scorer ----------------------------------------------------------------


def test_oracle_scores_pure_and_bounded():
    model = OracleModel(skill=3.0, sigma=1.0, noise_seed=5)
    features = (0.4, -0.2, 0.8)
    first = model.score(features)
    assert 0.0 <= first <= 1.0
    assert model.score(features) == first
    assert model.score_batch([features, features]) == [first, first]


def test_oracle_skill_grows_with_training_size():
    backend = OracleScorerBackend(SkillCurve(s0=1.0, k=2.0, n0=100), sigma=0.5)
    small = [LabeledExample(f"a{i}", (0.1 * i, 0.0), i % 2 == 0) for i in range(10)]
    large = small * 40
    model_small = backend.train_candidates(small, 1, seed=1)[0]
    model_large = backend.train_candidates(large, 2, seed=2)[0]
    assert model_large.skill > model_small.skill


def test_oracle_separation_improves_with_skill():
    rng = random.Random(3)
    rows = [((1.0 if i % 2 == 0 else -1.0) * rng.uniform(0.1, 1.0), rng.random()) for i in range(400)]
    truths = [i % 2 == 0 for i in range(400)]
    weak = OracleModel(skill=0.5, sigma=0.5, noise_seed=9)
    strong = OracleModel(skill=6.0, sigma=0.5, noise_seed=9)

    def auc_proxy(model):
        scored = sorted(zip(model.score_batch(rows), truths))
        ranks = {id(item): rank for rank, item in enumerate(scored)}
        del ranks
        positives = [s for s, t in scored if t]
        negatives = [s for s, t in scored if not t]
        wins = sum(1 for p in positives for n in negatives if p > n)
        return wins / (len(positives) * len(negatives))

    assert auc_proxy(strong) > auc_proxy(weak) > 0.5


# -- end-to-end simulation ---------------------------------------------------------


def test_small_run_resolves_everything(tmp_path):
    run = run_simulation(small_config(), tmp_path / "run")
    result = run.result
    assert result.unresolved == 0
    assert (
        result.human_positive + result.human_negative
        + result.auto_positive + result.auto_negative
        == result.total_items
    )
    assert result.final_precision is not None and result.final_precision > 0.8
    assert result.amplification is not None and result.amplification > 1.0
    run.store.check_invariants()
    assert (tmp_path / "run" / "journal.jsonl").exists()
    assert (tmp_path / "run" / "export.jsonl").exists()
    assert (tmp_path / "run" / "runlog.jsonl").exists()
    assert (tmp_path / "run" / "result.json").exists()


def test_service_metrics_equal_the_iteration_ledger(tmp_path):
    run = run_simulation(small_config(), tmp_path / "run")
    metrics = run.service.metrics("kitchen")
    reports = run.engine.reports

    assert len(metrics["thresholds_history"]) == len(reports)
    for entry, report in zip(metrics["thresholds_history"], reports):
        assert entry["iteration"] == report.iteration
        assert entry["upper"] == report.thresholds.upper
        assert entry["lower"] == report.thresholds.lower

    counts = metrics["state_counts"]
    assert counts["auto_positive"] == sum(r.auto_positive for r in reports)
    assert counts["auto_negative"] == sum(r.auto_negative for r in reports)
    human_resolved = sum(r.human_positive + r.human_negative for r in reports)
    assert counts["human_positive"] + counts["human_negative"] == human_resolved
    assert metrics["amplification_ratio"] == run.result.amplification
    assert metrics["iteration"] == reports[-1].iteration


def test_seed_fixed_rerun_is_byte_identical(tmp_path):
    run_simulation(small_config(), tmp_path / "one")
    run_simulation(small_config(), tmp_path / "two")
    for name in ("journal.jsonl", "runlog.jsonl", "export.jsonl", "result.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_skill_zero_run_degrades_gracefully(tmp_path):
    config = small_config(skill=SkillCurve(s0=0.0, k=0.0, n0=300))
    run = run_simulation(config, tmp_path / "noise")
    assert run.result.unresolved == 0
    assert run.engine.reports[-1].kind == "exhaustive"
    assert run.result.final_precision > 0.9  # double confirmation alone


def test_starved_worker_pool_abandons_cleanly(tmp_path):
    # one honest worker and one spammer: redundancy 2 can never be met, so
    # every round drains its in-flight items back to unlabeled and the run
    # ends with the pool unresolved instead of wedged
    from labelcascade.pool.types import ItemState

    config = small_config(
        pool_size=450,
        worker_count=2,
        spammer_fraction=0.5,
        cascade=CascadeConfig(
            batch_size=300, test_size=80, val_size=40, exhaustive_limit=100,
            max_iterations=2, seed=11,
        ),
    )
    run = run_simulation(config, tmp_path / "starved")
    assert run.engine.finished
    assert run.result.unresolved == run.result.total_items
    assert run.store.count(ItemState.IN_FLIGHT) == 0  # nothing stuck
    assert all(report.warning is not None for report in run.engine.reports
               if report.kind == "sampling")
    run.store.check_invariants()


# -- architecture: the simulator may only use public surfaces ----------------------


def test_sim_modules_import_only_public_names():
    sim_dir = Path(sim_package.__file__).parent
    for source_path in sim_dir.glob("*.py"):
        tree = ast.parse(source_path.read_text())
        for node in ast.walk(tree):
            if isinstance(node, ast.ImportFrom) and node.module:
                if node.module.startswith("labelcascade"):
                    for alias in node.names:
                        assert not alias.name.startswith("_"), (
                            f"{source_path.name} imports private {alias.name} from {node.module}"
                        )
            if isinstance(node, ast.Attribute) and isinstance(node.value, ast.Name):
                # no reaching into service/store privates like service._tally
                if node.value.id in ("service", "store", "engine"):
                    assert not node.attr.startswith("_"), (
                        f"{source_path.name} touches private member {node.value.id}.{node.attr}"
                    )
