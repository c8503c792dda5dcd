"""Deterministic sub-seed derivation.

All randomness in the package flows from one configured seed; group-level
work derives a stable sub-seed from (seed, group key) so parallel or
reordered execution cannot change results.
"""

from __future__ import annotations

import hashlib


def derive_seed(seed: int, *parts) -> int:
    """Stable 63-bit sub-seed from the global seed and a group key."""
    digest = hashlib.sha256(
        ("\x1f".join([str(seed)] + [str(p) for p in parts])).encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "big") >> 1
