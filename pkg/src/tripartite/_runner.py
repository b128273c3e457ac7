"""Deterministic seed partitioning for Monte-Carlo sweeps.

Trial ``i`` of a sweep with master seed ``s`` always uses the seed
``trial_seed(s, i)``, so results do not depend on the worker count and any
single trial can be replayed from the reported seed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np


def trial_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence([int(seed) & ((1 << 64) - 1), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_seeds(seed: int, start: int, stop: int) -> list[int]:
    return [trial_seed(seed, i) for i in range(start, stop)]


def chunk_ranges(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n)) if n else 1
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def run_chunked(fn: Callable, n: int, workers: int, args: Sequence = ()) -> list:
    """Call ``fn(start, stop, *args)`` over a partition of ``range(n)``.

    The results come back in chunk order. With ``workers > 1`` the chunks
    run in separate processes.
    """
    workers = max(1, int(workers))
    ranges = chunk_ranges(n, workers if workers > 1 else 1)
    if workers == 1 or len(ranges) == 1:
        return [fn(a, b, *args) for a, b in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, a, b, *args) for a, b in ranges]
        return [f.result() for f in futures]
