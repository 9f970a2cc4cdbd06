"""Order-preserving parallel map bounded by the HRL_THREADS environment variable."""

import concurrent.futures
import os

from tqdm import tqdm

THREADS_ENV = "HRL_THREADS"


def thread_count(default=1):
    """Number of worker threads from HRL_THREADS (at least 1)."""
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == "":
        return default
    try:
        return max(1, int(value))
    except ValueError:
        raise ValueError("%s must be a positive integer, got '%s'" % (THREADS_ENV, value))


def parallel_map(func, items, threads=None, progress=False, desc=None):
    """Applies `func` to every item and returns the results in input order.

    With one thread the items are processed sequentially in the caller's
    thread. Results never depend on the number of threads."""
    items = list(items)
    threads = thread_count() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) <= 1:
        iterator = tqdm(items, desc=desc) if progress else items
        return [func(item) for item in iterator]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        results = executor.map(func, items)
        if progress:
            results = tqdm(results, total=len(items), desc=desc)
        return list(results)
