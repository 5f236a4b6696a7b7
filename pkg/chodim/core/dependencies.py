#!/usr/bin/env python3
"""
Dependency providers for chodim: worker executors
"""

from concurrent.futures import Executor, Future, ThreadPoolExecutor
from functools import lru_cache
from typing import Any, Callable, Iterable, List, Optional, TypeVar

from chodim.core.config import settings

T = TypeVar("T")


class SerialExecutor(Executor):
    """Executor that runs every task in the calling thread, in submission order"""

    def submit(self, fn: Callable[..., T], /, *args: Any, **kwargs: Any) -> "Future[T]":
        future: "Future[T]" = Future()
        try:
            future.set_result(fn(*args, **kwargs))
        except BaseException as exc:  # propagated through future.result()
            future.set_exception(exc)
        return future


@lru_cache()
def get_serial_executor() -> SerialExecutor:
    """Get the in-thread executor"""
    return SerialExecutor()


@lru_cache()
def get_thread_executor(max_workers: int) -> ThreadPoolExecutor:
    """Get a shared thread pool of the given size"""
    return ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="chodim")


def get_executor(serial: Optional[bool] = None) -> Executor:
    """Get the executor for independent work items

    Serial mode (flag or CHODIM_SERIAL) always runs in-thread; otherwise a
    thread pool capped by CHODIM_THREADS is used.
    """
    if serial is None:
        serial = settings.SERIAL
    if serial or settings.THREADS <= 1:
        return get_serial_executor()
    return get_thread_executor(settings.THREADS)


def ordered_map(fn: Callable[[Any], T], items: Iterable[Any], executor: Optional[Executor] = None) -> List[T]:
    """Map fn over items on the executor and return results in input order"""
    executor = executor or get_serial_executor()
    futures = [executor.submit(fn, item) for item in items]
    return [f.result() for f in futures]
