"""Expert-labeled gold items used for quality checks inside HITs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from labelcascade.errors import InvalidArgumentError

ROLE_TUTORIAL = "tutorial"
ROLE_ONLINE = "online"
ROLE_HIDDEN = "hidden"
ROLES = (ROLE_TUTORIAL, ROLE_ONLINE, ROLE_HIDDEN)


@dataclass(frozen=True)
class GoldItem:
    item_id: str
    truth: bool
    role: str
    url: str = ""
    explanation: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise InvalidArgumentError(f"unknown gold role {self.role!r}")
        if self.role == ROLE_TUTORIAL and not self.explanation:
            raise InvalidArgumentError(f"tutorial gold {self.item_id} needs an explanation")


@dataclass
class GoldPools:
    """The three disjoint gold pools for one category."""

    tutorial: list[GoldItem] = field(default_factory=list)
    online: list[GoldItem] = field(default_factory=list)
    hidden: list[GoldItem] = field(default_factory=list)

    def pool(self, role: str) -> list[GoldItem]:
        if role == ROLE_TUTORIAL:
            return self.tutorial
        if role == ROLE_ONLINE:
            return self.online
        if role == ROLE_HIDDEN:
            return self.hidden
        raise InvalidArgumentError(f"unknown gold role {role!r}")

    def add(self, item: GoldItem) -> None:
        for role in ROLES:
            if any(existing.item_id == item.item_id for existing in self.pool(role)):
                raise InvalidArgumentError(
                    f"gold item {item.item_id} already present in pool {role!r}"
                )
        self.pool(item.role).append(item)

    def truth_of(self, item_id: str) -> bool | None:
        for role in ROLES:
            for item in self.pool(role):
                if item.item_id == item_id:
                    return item.truth
        return None


def load_gold_file(path: str | Path) -> GoldPools:
    """Read a line-delimited gold file: {item_id, truth, role, url?, explanation?}."""
    pools = GoldPools()
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                item = GoldItem(
                    item_id=str(raw["item_id"]),
                    truth=bool(raw["truth"]),
                    role=str(raw["role"]),
                    url=str(raw.get("url", "")),
                    explanation=str(raw.get("explanation", "")),
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise InvalidArgumentError(f"bad gold record at {path}:{line_number}: {exc}")
            pools.add(item)
    return pools
