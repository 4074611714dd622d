"""Deterministic seed derivation.

All randomness in a run flows from one master seed. Child seeds are derived
by hashing a label path, never by sharing RNG state, so call order in one
subsystem cannot perturb another.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *path: object) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master)).encode())
    for part in path:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "big")
