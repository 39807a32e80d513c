"""
Counter-based random streams and the batch runner.

Every random quantity in the lab is drawn from a Philox stream addressed by
(seed, tag, index): the key comes from the seed and the tag, the counter from
the index. Path i of an experiment therefore sees the same normals no matter
how the paths are split into batches or how many workers run them, and a
prefix of a stream never changes when more values are requested.
"""

from __future__ import annotations

import logging
import os
import zlib
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import TypeVar

import numpy as np

from .errors import RejectedInputError

logger = logging.getLogger(__name__)

T = TypeVar("T")

WORKERS_ENV = "INTEGRABILITY_LAB_WORKERS"
MAX_SEED = 2**64 - 1


# ---------------------------------------------------------------------------
# Stream addressing
# ---------------------------------------------------------------------------

def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise RejectedInputError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise RejectedInputError(f"seed must lie in [0, 2^64), got {seed}")
    return seed


@lru_cache(maxsize=256)
def _stream_key(seed: int, tag: str) -> tuple[int, int]:
    tag_word = zlib.crc32(tag.encode("utf-8"))
    state = np.random.SeedSequence(entropy=seed, spawn_key=(tag_word,))
    words = state.generate_state(2, dtype=np.uint64)
    return int(words[0]), int(words[1])


def philox_generator(seed: int, tag: str, index: int) -> np.random.Generator:
    """Generator for stream `index` of the (seed, tag) family."""
    seed = _check_seed(seed)
    if index < 0:
        raise RejectedInputError(f"stream index must be non-negative, got {index}")
    key = np.array(_stream_key(seed, tag), dtype=np.uint64)
    # low words count draws inside a stream, the third word selects the stream
    counter = np.array([0, 0, int(index), 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def standard_normal_rows(
    seed: int, tag: str, start: int, count: int, width: int
) -> np.ndarray:
    """
    Rows start..start+count-1 of the (seed, tag) normal table, shape (count, width).

    Row i is the first `width` normals of stream i, so a wider request
    extends each row without changing its prefix.
    """
    if count < 0 or width < 0:
        raise RejectedInputError("count and width must be non-negative")
    out = np.empty((count, width), dtype=float)
    for row in range(count):
        out[row] = philox_generator(seed, tag, start + row).standard_normal(width)
    return out


# ---------------------------------------------------------------------------
# Batch runner
# ---------------------------------------------------------------------------

def get_worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", WORKERS_ENV, raw)
        return 1
    return max(1, workers)


def batch_bounds(n_items: int, batch_size: int) -> list[tuple[int, int]]:
    if batch_size < 1:
        raise RejectedInputError(f"batch_size must be positive, got {batch_size}")
    return [
        (start, min(start + batch_size, n_items))
        for start in range(0, n_items, batch_size)
    ]


def map_batches(
    fn: Callable[[int, int], T], n_items: int, batch_size: int
) -> list[T]:
    """
    Apply fn(start, stop) to consecutive fixed-size batches, results in batch order.

    The batch layout depends only on n_items and batch_size, never on the
    worker count, so reductions over the returned list are reproducible.
    """
    bounds = batch_bounds(n_items, batch_size)
    workers = get_worker_count()
    if workers == 1 or len(bounds) <= 1:
        return [fn(start, stop) for start, stop in bounds]
    logger.debug("Running %d batches on %d workers", len(bounds), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(ab[0], ab[1]), bounds))
