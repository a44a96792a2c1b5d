"""
Timing helpers for logging long-running operations.
"""

import logging
import time
from contextlib import contextmanager

logger = logging.getLogger(__name__)


class Stopwatch:
    """Wall-clock stopwatch reporting elapsed milliseconds."""

    def __init__(self):
        self.start_time = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start_time

    @property
    def elapsed_ms(self) -> int:
        return int(round(self.elapsed * 1000))


@contextmanager
def log_duration(label, log=None):
    """
    Log the start and completion of an operation and its processing time.

    Yields:
        The running Stopwatch
    """
    log = log or logger
    watch = Stopwatch()
    log.info(f"Started {label}")
    try:
        yield watch
    finally:
        log.info(f"Completed {label} in {watch.elapsed:.2f}s")
