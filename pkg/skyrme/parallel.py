import asyncio
import os
from typing import Callable, Iterable, List, Optional, TypeVar

from dotenv import load_dotenv

load_dotenv()

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    env = os.getenv("SKYRME_WORKERS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def map_in_threads(fn: Callable[[T], R], items: Iterable[T],
                   workers: Optional[int] = None) -> List[R]:
    """Run `fn` over `items` on worker threads; results keep the input order.

    Must not be called from inside a running event loop (HTTP handlers go
    through `asyncio.to_thread` first).
    """
    items = list(items)
    if not items:
        return []
    max_parallel = workers or default_workers()
    if max_parallel <= 1 or len(items) == 1:
        return [fn(item) for item in items]

    async def _gather() -> List[R]:
        sem = asyncio.Semaphore(max_parallel)

        async def worker(item: T) -> R:
            async with sem:
                return await asyncio.to_thread(fn, item)

        return list(await asyncio.gather(*(worker(i) for i in items)))

    return asyncio.run(_gather())
