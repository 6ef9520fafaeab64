import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads=None):
    if threads is None:
        threads = os.environ.get("FRACLAP_THREADS", "1")
    try:
        return max(1, int(threads))
    except ValueError:
        return 1


def pmap(fn, items, threads=None):
    """Order-preserving map; uses a thread pool when more than one thread is requested."""
    items = list(items)
    k = resolve_threads(threads)
    if k == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))
