"""Chunked sample loops whose results do not depend on the thread count.

Work is split into fixed-size chunks; chunk ``i`` always draws from
substream ``stream.child(i)`` and results are returned in chunk order.
The compiled kernels release the GIL, so a thread pool gives real
parallelism when the extension is built.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .rng import RandomStream

CHUNK = 2048

R = TypeVar("R")


def chunk_sizes(total: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(
    fn: Callable[[int, np.random.Generator], R],
    total: int,
    stream: RandomStream,
    threads: int = 1,
    chunk: int = CHUNK,
) -> list[R]:
    """Call ``fn(count, rng)`` once per chunk and return the results in chunk order."""
    sizes = chunk_sizes(total, chunk)

    def run(i: int) -> R:
        return fn(sizes[i], stream.child(i).generator())

    if threads <= 1 or len(sizes) <= 1:
        return [run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, range(len(sizes))))
