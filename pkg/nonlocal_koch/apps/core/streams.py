import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)


def as_seed_sequence(seed):
    """Accept an int, a SeedSequence or a Generator as a master seed."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2 ** 63)))
    return np.random.SeedSequence(seed)


def chunk_sizes(n_paths, chunk_size=None):
    chunk_size = chunk_size or settings.NONLOCAL_KOCH_CHUNK_SIZE
    full, rest = divmod(int(n_paths), chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunked(worker, n_paths, seed, threads=None, chunk_size=None):
    """
    Run `worker(size, rng)` over fixed-size chunks of paths.

    Every chunk owns a child stream of the master seed and results are
    gathered in chunk order, so the output is the same for any thread count.
    `worker` returns a dict of per-path arrays; the dict of concatenated
    arrays is returned.
    """
    threads = threads or settings.NONLOCAL_KOCH_THREADS
    sizes = chunk_sizes(n_paths, chunk_size)
    children = as_seed_sequence(seed).spawn(len(sizes))

    def _run(job):
        index, (size, child) = job
        logger.debug('chunk %d: %d paths', index, size)
        return worker(size, np.random.default_rng(child))

    jobs = list(enumerate(zip(sizes, children)))
    if threads == 1 or len(jobs) == 1:
        results = [_run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run, jobs))
    if not results:
        return {}
    return {
        key: np.concatenate([np.atleast_1d(part[key]) for part in results])
        for key in results[0]
    }
