from __future__ import annotations

import json

from labelcascade.pool.store import PoolStore, derive_item_id
from labelcascade.pool.types import ItemState


def row(url, width, height, **extra):
    return {"url": url, "width": width, "height": height, **extra}


def test_size_filter_is_strictly_greater_than():
    store = PoolStore()
    report = store.ingest_manifest(
        [
            row("https://a.test/1.jpg", 300, 400),  # accepted
            row("https://a.test/2.jpg", 256, 512),  # min == 256: rejected
            row("https://a.test/3.jpg", 257, 257),  # accepted, just over
        ],
        category="kitchen",
    )
    assert report.accepted == 2
    assert report.rejected_size == 1
    assert report.seen == 3
    assert store.count(ItemState.UNLABELED) == 2


def test_exact_url_duplicates_dropped_after_first():
    store = PoolStore()
    report = store.ingest_manifest(
        [
            row("https://a.test/x.jpg", 300, 300),
            row("https://a.test/x.jpg", 900, 900),
            row("https://a.test/X.jpg", 300, 300),  # different string: kept
        ],
        category="kitchen",
    )
    assert report.duplicate_urls == 1
    assert report.accepted == 2


def test_duplicate_of_rejected_url_still_counts_as_duplicate():
    store = PoolStore()
    report = store.ingest_manifest(
        [row("https://a.test/small.jpg", 100, 100), row("https://a.test/small.jpg", 800, 800)],
        category="kitchen",
    )
    assert report.rejected_size == 1
    assert report.duplicate_urls == 1
    assert report.accepted == 0


def test_conservation_identity_holds():
    store = PoolStore()
    rows = [row(f"https://a.test/{i}.jpg", 200 + i * 10, 400) for i in range(30)]
    rows += rows[:7]  # duplicates
    rows += ["{not json", row("https://a.test/nowidth.jpg", None, 4)]  # malformed
    report = store.ingest_manifest(rows, category="kitchen")
    assert report.seen == report.duplicate_urls + report.rejected_size + report.accepted
    assert report.malformed == 2
    assert report.seen == 37


def test_malformed_rows_never_abort_the_stream():
    store = PoolStore()
    rows = [
        "{broken",
        json.dumps(row("https://a.test/ok.jpg", 500, 500)),
        {"url": "https://a.test/short.jpg"},  # missing dims
        {"url": 12, "width": 500, "height": 500},  # bad url type
        row("https://a.test/feat.jpg", 500, 500, features="nope"),
        row("https://a.test/ok2.jpg", 500, 500),
    ]
    report = store.ingest_manifest(rows, category="kitchen")
    assert report.accepted == 2
    assert report.malformed == 4


def test_id_derived_from_url_hash_when_absent():
    store = PoolStore()
    url = "https://a.test/derive.jpg"
    store.ingest_manifest([row(url, 500, 500)], category="kitchen")
    assert derive_item_id(url) in store


def test_rejected_items_kept_when_configured():
    store = PoolStore()
    store.ingest_manifest(
        [row("https://a.test/tiny.jpg", 64, 64)], category="kitchen", store_rejected=True
    )
    assert store.count(ItemState.REJECTED_AT_INGEST) == 1
    dropped = PoolStore()
    dropped.ingest_manifest([row("https://a.test/tiny.jpg", 64, 64)], category="kitchen")
    assert len(dropped) == 0


def test_feature_dimension_fixed_per_category():
    store = PoolStore()
    report = store.ingest_manifest(
        [
            row("https://a.test/f1.jpg", 500, 500, features=[0.1, 0.2]),
            row("https://a.test/f2.jpg", 500, 500, features=[0.1, 0.2, 0.3]),  # mismatch
            row("https://a.test/f3.jpg", 500, 500, features=[0.5, 0.6]),
        ],
        category="kitchen",
    )
    assert report.accepted == 2
    assert report.malformed == 1


def test_custom_min_dim():
    store = PoolStore()
    report = store.ingest_manifest(
        [row("https://a.test/1.jpg", 130, 500), row("https://a.test/2.jpg", 120, 500)],
        category="kitchen",
        min_dim=128,
    )
    assert report.accepted == 1
    assert report.rejected_size == 1
