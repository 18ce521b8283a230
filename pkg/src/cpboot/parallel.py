from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def pmap(fn, items, workers: int = 1) -> list:
    """Ordered map; results never depend on ``workers``, only wall time does."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))
