"""Stable sub-seed derivation for replayable simulations.

hash() is salted per process, so sub-seeds are derived from sha256 instead;
the same (base, tags) always yields the same stream on every platform.
"""

from __future__ import annotations

import hashlib


def derive_seed(*parts: object) -> int:
    """64-bit seed deterministically derived from the given parts."""
    key = ":".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
