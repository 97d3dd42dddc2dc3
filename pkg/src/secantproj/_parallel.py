"""Deterministic data-parallel helpers.

Work is split into fixed-size blocks whose boundaries never depend on the
worker count, and partial results are combined in block order. Threads are
enough because the per-block work is numpy code that releases the GIL.
"""

from concurrent.futures import ThreadPoolExecutor

BLOCK_SIZE = 1 << 14


def block_bounds(total, block_size=None):
    block_size = block_size or BLOCK_SIZE
    return [(start, min(start + block_size, total)) for start in range(0, total, block_size)]


def map_blocks(func, bounds, workers):
    """Apply ``func(start, stop)`` to each block; results keep block order."""
    if workers <= 1 or len(bounds) <= 1:
        return [func(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=min(workers, len(bounds))) as pool:
        return list(pool.map(lambda ab: func(*ab), bounds))
