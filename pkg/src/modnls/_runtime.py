"""Worker-count plumbing for the FFT-heavy kernels.

The library defaults to a single worker so test runs are deterministic
and quiet; the CLI raises it (all cores unless --threads or the
YNLS_THREADS environment variable says otherwise). BLAS threading is
controlled separately through the usual *_NUM_THREADS variables, which
the CLI sets before numpy is imported.
"""

from __future__ import annotations

import os

_workers: int | None = None


def get_workers() -> int:
    global _workers
    if _workers is None:
        env = os.environ.get("YNLS_THREADS", "")
        try:
            _workers = max(1, int(env)) if env else 1
        except ValueError:
            _workers = 1
    return _workers


def set_workers(n) -> None:
    """Set the FFT worker count; None re-reads YNLS_THREADS on next use."""
    global _workers
    if n is None:
        _workers = None
        return
    if int(n) != n or n < 1:
        raise ValueError(f"worker count must be a positive integer, got {n}")
    _workers = int(n)
