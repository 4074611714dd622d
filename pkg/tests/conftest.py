"""Session fixtures: the two reference simulation scenarios.

Scenario A (strong scorer) and Scenario B (useless scorer) are full
200k-item runs shared by several acceptance tests, so they run once per
session. Scenario A runs twice for the byte-identity determinism check.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from labelcascade.cascade.config import CascadeConfig
from labelcascade.sim.config import SimConfig, SkillCurve
from labelcascade.sim.harness import run_simulation


def scenario_a_config() -> SimConfig:
    return SimConfig(
        pool_size=200_000,
        prevalence=0.3,
        difficulty_alpha=1.0,
        difficulty_beta=1.0,
        worker_count=20,
        worker_flip_low=0.05,
        worker_flip_high=0.05,
        spammer_fraction=0.1,
        skill=SkillCurve(s0=0.5, k=2.2, n0=2000),
        noise_sigma=0.35,
        seed=42,
        cascade=CascadeConfig(
            batch_size=4_000,
            test_size=1_000,
            val_size=500,
            exhaustive_limit=15_000,
            max_iterations=12,
            seed=42,
        ),
    )


def scenario_b_config() -> SimConfig:
    import dataclasses

    return dataclasses.replace(scenario_a_config(), skill=SkillCurve(s0=0.0, k=0.0, n0=2000))


@pytest.fixture(scope="session")
def scenario_a(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("scenario_a")
    started = time.monotonic()
    run = run_simulation(scenario_a_config(), outdir)
    elapsed = time.monotonic() - started
    return {"run": run, "elapsed": elapsed, "outdir": outdir}


@pytest.fixture(scope="session")
def scenario_a_repeat(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("scenario_a_repeat")
    run = run_simulation(scenario_a_config(), outdir)
    return {"run": run, "outdir": outdir}


@pytest.fixture(scope="session")
def scenario_b(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("scenario_b")
    started = time.monotonic()
    run = run_simulation(scenario_b_config(), outdir)
    elapsed = time.monotonic() - started
    return {"run": run, "elapsed": elapsed, "outdir": outdir}
