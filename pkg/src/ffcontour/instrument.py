"""Operation counters used to check the complexity bounds without timers."""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager

COUNTS: Counter = Counter()


def count(name: str, n: int = 1) -> None:
    COUNTS[name] += n


@contextmanager
def counting():
    """Yield a fresh Counter that collects every op counted inside the block."""
    saved = COUNTS.copy()
    COUNTS.clear()
    snapshot = Counter()
    try:
        yield snapshot
    finally:
        snapshot.update(COUNTS)
        COUNTS.clear()
        COUNTS.update(saved)
        COUNTS.update(snapshot)
