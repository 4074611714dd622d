"""Operator command line.

Every command works against a journal file: ingest populates it, serve and
cascade append to it, stats/export/audit replay it. Nonzero exit with a
message on any failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from pathlib import Path

from labelcascade.cascade.audit import precision_audit
from labelcascade.cascade.config import load_cascade_config
from labelcascade.cascade.engine import CascadeEngine
from labelcascade.clock import SimClock
from labelcascade.crowd.gold import load_gold_file
from labelcascade.errors import InvalidArgumentError, LabelCascadeError
from labelcascade.pool.journal import read_events
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import CategorySpec, ItemState
from labelcascade.scorer.backend import ReferenceScorerBackend
from labelcascade.seeding import derive_seed
from labelcascade.svc.service import LabelingService, ServiceConfig


def _open_store(journal_path: str, clock=None) -> PoolStore:
    return PoolStore.open(journal_path, clock=clock)


def _replayed_store(journal_path: str) -> PoolStore:
    if not Path(journal_path).exists():
        raise InvalidArgumentError(f"journal {journal_path} does not exist")
    return PoolStore.replay(journal_path)


def _iter_manifest(path: str):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield line


def cmd_ingest(args: argparse.Namespace) -> int:
    store = _open_store(args.journal)
    report = store.ingest_manifest(
        _iter_manifest(args.manifest),
        category=args.category,
        min_dim=args.min_dim,
        store_rejected=args.store_rejected,
    )
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from labelcascade.svc.api import create_app
    from labelcascade.svc.runners import ServiceCrowd

    store = _open_store(args.journal)
    service = LabelingService(
        store,
        ServiceConfig(seed=args.seed, assignment_timeout_s=args.assignment_timeout),
    )
    gold = load_gold_file(args.gold)
    service.register_category(
        CategorySpec(name=args.category, kind=args.kind, definition_text=args.definition),
        gold,
    )
    if args.cascade_config:
        config = load_cascade_config(args.cascade_config)
        engine = CascadeEngine(
            store,
            ReferenceScorerBackend(),
            ServiceCrowd(service),
            config,
            category=args.category,
            run_log_path=args.run_log,
        )
        thread = threading.Thread(target=engine.run, name="cascade-engine", daemon=True)
        thread.start()
        print(f"cascade engine running for category {args.category!r}")
    host, _, port = args.addr.rpartition(":")
    app = create_app(service)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def _build_sim_crowd(args: argparse.Namespace, service: LabelingService, clock: SimClock):
    from labelcascade.sim.config import SimConfig
    from labelcascade.sim.workers import SimulatedCrowd, build_workers

    truth: dict[str, bool] = {}
    with open(args.truth, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                row = json.loads(line)
                truth[row["item_id"]] = bool(row["truth"])
    for pool in (service.category_state(args.category).gold,):
        for role_pool in (pool.tutorial, pool.online, pool.hidden):
            for g in role_pool:
                truth[g.item_id] = g.truth
    sim_cfg = SimConfig(
        pool_size=max(1, len(truth)),
        worker_count=args.workers,
        worker_flip_low=args.flip_prob,
        worker_flip_high=args.flip_prob,
        spammer_fraction=args.spammer_fraction,
        seed=args.seed,
    )
    workers = build_workers(sim_cfg)
    return SimulatedCrowd(
        service, workers, clock, truth_of=lambda item_id: truth[item_id],
        seed=derive_seed(args.seed, "cli-crowd"),
    )


def cmd_cascade(args: argparse.Namespace) -> int:
    clock = SimClock(start=0)
    store = _open_store(args.journal, clock=clock)
    service = LabelingService(store, ServiceConfig(seed=args.seed), clock=clock)
    gold = load_gold_file(args.gold)
    service.register_category(
        CategorySpec(name=args.category, kind=args.kind, definition_text=args.definition),
        gold,
    )
    config = load_cascade_config(args.config)
    crowd = _build_sim_crowd(args, service, clock)
    engine = CascadeEngine(
        store,
        ReferenceScorerBackend(),
        crowd,
        config,
        category=args.category,
        run_log_path=args.run_log,
    )
    state_path = Path(args.state) if args.state else Path(args.journal).with_suffix(".cascade.json")
    if state_path.exists():
        with open(state_path, encoding="utf-8") as fh:
            engine.load_state(json.load(fh))
    if args.mode == "step":
        report = engine.step()
        reports = [report]
    else:
        reports = engine.run()
    with open(state_path, "w", encoding="utf-8") as fh:
        json.dump(engine.state_dict(), fh)
    for report in reports:
        summary = report.as_dict()
        summary.pop("test_scored", None)
        print(json.dumps(summary))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    from labelcascade.sim.config import load_sim_config
    from labelcascade.sim.harness import run_simulation

    config = load_sim_config(args.config)
    if args.seed is not None:
        import dataclasses

        cascade = dataclasses.replace(config.cascade, seed=args.seed)
        config = dataclasses.replace(config, seed=args.seed, cascade=cascade)
    run = run_simulation(config, args.out)
    print(json.dumps(run.result.as_dict(), indent=2, sort_keys=True))
    print(f"artifacts in {args.out}", file=sys.stderr)
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    store = _replayed_store(args.journal)
    positives = [
        item_id
        for state in (ItemState.HUMAN_POSITIVE, ItemState.AUTO_POSITIVE)
        for item_id in store.ids_in(state)
        if store.get(item_id).category == args.category
    ]
    expert: dict[str, bool] = {}
    with open(args.expert_file, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                row = json.loads(line)
                expert[row["item_id"]] = bool(row["label"] in (True, "positive", "yes"))
    audit = precision_audit(positives, args.sample_n, expert, seed=args.seed)
    print(json.dumps(audit.as_dict(), indent=2))
    return 0


def _human_labeled_from_journal(journal_path: str, category: str) -> set[str]:
    hit_targets: dict[str, list[str]] = {}
    labeled: set[str] = set()
    for event in read_events(journal_path):
        if event.event_kind == "hit_assembled" and event.payload.get("category") == category:
            hit_targets[event.payload["hit_id"]] = event.payload["targets"]
        elif event.event_kind == "submission" and event.payload.get("verdict") == "accepted":
            labeled.update(hit_targets.get(event.payload["hit_id"], ()))
    return labeled


def cmd_stats(args: argparse.Namespace) -> int:
    store = _replayed_store(args.journal)
    counts = store.counts_for_category(args.category)
    human_labeled = _human_labeled_from_journal(args.journal, args.category)
    resolved = sum(
        counts[state.value]
        for state in (
            ItemState.HUMAN_POSITIVE,
            ItemState.HUMAN_NEGATIVE,
            ItemState.AUTO_POSITIVE,
            ItemState.AUTO_NEGATIVE,
        )
    )
    print(
        json.dumps(
            {
                "category": args.category,
                "state_counts": counts,
                "total_resolved": resolved,
                "human_labeled_items": len(human_labeled),
                "amplification_ratio": (
                    resolved / len(human_labeled) if human_labeled else None
                ),
            },
            indent=2,
        )
    )
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    store = _replayed_store(args.journal)
    count = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in store.export_lines():
            item_id = json.loads(line)["id"]
            if store.get(item_id).category == args.category:
                fh.write(line + "\n")
                count += 1
    print(f"exported {count} labels to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelcascade",
        description="Classifier-amplified human labeling pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a manifest of candidate items")
    p.add_argument("manifest")
    p.add_argument("--category", required=True)
    p.add_argument("--min-dim", type=int, default=256)
    p.add_argument("--journal", default="journal.jsonl")
    p.add_argument("--store-rejected", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("serve", help="run the HTTP labeling service")
    p.add_argument("--addr", default="127.0.0.1:8700")
    p.add_argument("--journal", default="journal.jsonl")
    p.add_argument("--category", required=True)
    p.add_argument("--kind", default="scene", choices=["scene", "object"])
    p.add_argument("--definition", default="")
    p.add_argument("--gold", required=True, help="gold pool file (line-delimited JSON)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--assignment-timeout", type=int, default=30 * 60,
                   help="seconds before an unfinished assignment is reclaimed")
    p.add_argument("--cascade-config", help="run the cascade engine in-process")
    p.add_argument("--run-log", default="runlog.jsonl")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("cascade", help="drive cascade iterations with simulated workers")
    p.add_argument("mode", choices=["run", "step"])
    p.add_argument("--category", required=True)
    p.add_argument("--kind", default="scene", choices=["scene", "object"])
    p.add_argument("--definition", default="")
    p.add_argument("--config", required=True)
    p.add_argument("--journal", default="journal.jsonl")
    p.add_argument("--gold", required=True)
    p.add_argument("--truth", required=True, help="line-delimited {item_id, truth} for workers")
    p.add_argument("--workers", type=int, default=20)
    p.add_argument("--flip-prob", type=float, default=0.05)
    p.add_argument("--spammer-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", help="engine state file (default <journal>.cascade.json)")
    p.add_argument("--run-log", default="runlog.jsonl")
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("simulate", help="run a fully synthetic end-to-end simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="expert precision audit of the positive set")
    p.add_argument("--category", required=True)
    p.add_argument("--journal", default="journal.jsonl")
    p.add_argument("--sample-n", type=int, required=True)
    p.add_argument("--expert-file", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("stats", help="state counts and amplification for a category")
    p.add_argument("--category", required=True)
    p.add_argument("--journal", default="journal.jsonl")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export", help="write final labels as line-delimited JSON")
    p.add_argument("--category", required=True)
    p.add_argument("--journal", default="journal.jsonl")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LabelCascadeError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
