"""Stable fan-out from one master seed to per-stage sub-seeds."""

from __future__ import annotations

import hashlib


def derive_seed(master: int, stage: str, index: int = 0) -> int:
    """64-bit sub-seed from (master, stage name, index), stable across runs."""
    digest = hashlib.sha256(f"{master}:{stage}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")
