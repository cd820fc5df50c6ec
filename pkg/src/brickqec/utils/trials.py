"""
brickqec.utils.trials - run independent Monte Carlo trials over a process pool.

Results come back in task order whatever the worker count, so aggregated
counts are identical for 1 or N workers.
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import psutil
from tqdm import tqdm

from brickqec.utils.libw import verbo

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    """Physical core count (config ``workers: 0`` means this)."""
    return max(1, psutil.cpu_count(logical=False) or psutil.cpu_count() or 1)


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        from brickqec.core.config import get_config
        workers = get_config().workers
    return default_workers() if not workers else max(1, int(workers))


def progress_enabled(progress: Optional[bool]) -> bool:
    if progress is not None:
        return progress
    from brickqec.core.config import get_config
    try:
        tty = sys.stderr.isatty()
    except Exception:
        tty = False
    return bool(get_config().progress_bar) and tty


def run_tasks(fn: Callable[[T], R], tasks: Sequence[T], workers: Optional[int] = None,
              desc: str = "trials", progress: Optional[bool] = None) -> list[R]:
    """``[fn(t) for t in tasks]``, optionally spread over worker processes.

    *fn* must be a module-level function so it can be pickled.
    """
    n_workers = min(resolve_workers(workers), max(1, len(tasks)))
    show = progress_enabled(progress)
    verbo(f"[trials] {len(tasks)} {desc} on {n_workers} worker(s)")
    if n_workers == 1:
        it: Iterable[R] = (fn(t) for t in tasks)
        return list(tqdm(it, total=len(tasks), desc=desc, disable=not show, file=sys.stderr))

    chunk = max(1, len(tasks) // (n_workers * 8))
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        it = pool.map(fn, tasks, chunksize=chunk)
        return list(tqdm(it, total=len(tasks), desc=desc, disable=not show, file=sys.stderr))
