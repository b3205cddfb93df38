"""Deterministic, splittable random streams.

All randomness flows through Philox (counter-based) generators keyed by
a 64-bit master seed. Parallel work derives one substream per task index
via ``SeedSequence`` spawn keys, so results are independent of worker
count and of execution order.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

ENV_SEED = "QFP_SEED"


def master_stream(seed: int) -> Generator:
    """Top-level stream for single-threaded sampling."""
    return Generator(Philox(SeedSequence(seed)))


def substream(seed: int, *path: int) -> Generator:
    """Stream for task ``path`` (e.g. restart index, basis index).

    Depends only on ``(seed, path)``, never on how many workers run.
    """
    return Generator(Philox(SeedSequence(seed, spawn_key=tuple(path))))


def resolve_seed(explicit: int | None, default: int = 0) -> int:
    """Seed precedence: explicit flag, then QFP_SEED, then default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(ENV_SEED)
    if env is not None:
        return int(env)
    return default


def parallel_map(fn, n_tasks: int, threads: int | None = None) -> list:
    """Run ``fn(i)`` for i in range(n_tasks), results in task order.

    Reduction order is fixed by task index regardless of ``threads``.
    """
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or n_tasks <= 1:
        return [fn(i) for i in range(n_tasks)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_tasks)))


def standard_complex(rng: Generator, size) -> np.ndarray:
    """Complex Gaussians with independent N(0,1) real and imaginary parts."""
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)
