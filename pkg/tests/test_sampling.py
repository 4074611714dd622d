from __future__ import annotations

import pytest

from labelcascade.errors import InvalidArgumentError
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import ItemState

from helpers import make_rows

# chi-square critical value, df=9, alpha=0.01
CHI2_CRIT_DF9_P01 = 21.666


def seeded_store(n):
    store = PoolStore()
    store.ingest_manifest(make_rows(n), category="kitchen")
    return store


def test_exhaustive_sample_returns_whole_set():
    store = seeded_store(12)
    sample = store.sample_uniform(12, ItemState.UNLABELED, seed=5)
    assert sorted(sample) == store.ids_in(ItemState.UNLABELED)


def test_empty_sample():
    store = seeded_store(3)
    assert store.sample_uniform(0, ItemState.UNLABELED, seed=1) == []


def test_oversized_sample_names_available_count():
    store = seeded_store(4)
    with pytest.raises(InvalidArgumentError, match="4 available"):
        store.sample_uniform(5, ItemState.UNLABELED, seed=1)


def test_determinism_same_seed_same_store():
    store = seeded_store(40)
    first = store.sample_uniform(10, ItemState.UNLABELED, seed=99)
    second = store.sample_uniform(10, ItemState.UNLABELED, seed=99)
    assert first == second
    assert store.sample_uniform(10, ItemState.UNLABELED, seed=100) != first


def test_samples_are_distinct_without_replacement():
    store = seeded_store(25)
    sample = store.sample_uniform(20, ItemState.UNLABELED, seed=3)
    assert len(set(sample)) == 20


def test_single_draws_uniform_by_chi_square():
    store = seeded_store(10)
    ids = store.ids_in(ItemState.UNLABELED)
    counts = {item_id: 0 for item_id in ids}
    draws = 10_000
    for seed in range(draws):
        counts[store.sample_uniform(1, ItemState.UNLABELED, seed=seed)[0]] += 1
    expected = draws / len(ids)
    chi2 = sum((observed - expected) ** 2 / expected for observed in counts.values())
    assert chi2 < CHI2_CRIT_DF9_P01, f"chi-square {chi2:.2f} exceeds the 1% critical value"
