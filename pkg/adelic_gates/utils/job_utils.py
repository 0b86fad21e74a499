#!/usr/bin/env python3

import logging
import queue
import threading
import time
import traceback
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence

logger = logging.getLogger("adelic_gates.utils.job_utils")


@dataclass
class JobResult:
    """Outcome of one isolated job; exactly one of value / error is set."""
    index: int
    value: Any = None
    error: Optional[BaseException] = None
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_one(fn: Callable[[Any], Any], index: int, item: Any) -> JobResult:
    start_time = time.perf_counter()
    try:
        value = fn(item)
        return JobResult(index, value=value, elapsed=time.perf_counter() - start_time)
    except Exception as e:
        logger.error(f"Job {index} failed: {e}")
        logger.debug(traceback.format_exc())
        return JobResult(index, error=e, elapsed=time.perf_counter() - start_time)


def run_jobs(fn: Callable[[Any], Any], items: Sequence[Any], jobs: int = 1) -> List[JobResult]:
    """
    Run fn over independent items on up to `jobs` worker threads.

    Each job is isolated: an exception is captured in its JobResult and does
    not affect the others. Results come back in input order.

    Args:
        fn: Function applied to each item
        items: Inputs, one job each
        jobs: Number of worker threads (1 runs everything in the calling thread)

    Returns:
        One JobResult per item, ordered like items
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(items) <= 1:
        return [_run_one(fn, i, item) for i, item in enumerate(items)]

    work_queue: "queue.Queue[tuple]" = queue.Queue()
    for i, item in enumerate(items):
        work_queue.put((i, item))
    result_queue: "queue.Queue[JobResult]" = queue.Queue()

    def worker():
        while True:
            try:
                i, item = work_queue.get(block=False)
            except queue.Empty:
                return
            result_queue.put(_run_one(fn, i, item))

    threads = [threading.Thread(target=worker, daemon=True) for _ in range(min(jobs, len(items)))]
    logger.info(f"Running {len(items)} jobs on {len(threads)} threads")
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    results = [result_queue.get(block=False) for _ in range(len(items))]
    return sorted(results, key=lambda r: r.index)
