"""Thread-pool helpers honouring the POLYDEF_THREADS cap."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError

ENV_VAR = "POLYDEF_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    return max(1, n)


def ordered_map(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly threaded; results keep input order."""
    items = list(items)
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
