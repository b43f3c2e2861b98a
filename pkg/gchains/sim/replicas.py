"""Replica batching and the worker pool."""

import logging
import multiprocessing as mp
from typing import Callable, Optional, Sequence

from gchains.config import Config
from gchains.errors import HorizonError

logger = logging.getLogger(__name__)


def chunk_ranges(replicas: int, chunk: Optional[int] = None) -> list:
    """[(start, stop), ...] covering range(replicas) in blocks of `chunk`."""
    chunk = chunk or Config.REPLICA_CHUNK
    if replicas < 1:
        raise HorizonError(f"replicas must be >= 1, got {replicas}")
    return [(start, min(start + chunk, replicas)) for start in range(0, replicas, chunk)]


def run_chunks(task: Callable, chunks: Sequence[tuple], workers: Optional[int] = None) -> list:
    """task(*args) for every chunk, results in chunk order.

    `task` must be a module-level function so it pickles into worker processes.
    """
    workers = workers or Config.WORKERS
    if workers < 1:
        raise HorizonError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(chunks) == 1:
        return [task(*args) for args in chunks]
    logger.info("[sim] %d chunks on %d workers", len(chunks), workers)
    with mp.Pool(processes=min(workers, len(chunks))) as pool:
        return pool.starmap(task, chunks)
