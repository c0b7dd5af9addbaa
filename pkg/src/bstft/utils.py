"""Small shared helpers."""

from __future__ import annotations

import os


def worker_count() -> int:
    """Parallel worker cap: BSTFT_THREADS env var, default the CPU count."""
    raw = os.environ.get("BSTFT_THREADS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return max(1, os.cpu_count() or 1)
