"""Counter-based random numbers and order-independent parallel sampling.

Sample i of a stream always reads the same block of a Philox stream keyed by
(seed, stream tag), so results do not depend on chunking or worker count.
"""
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

WORKERS_ENV = "ONEFORM_WORKERS"
CHUNK = 2048


def stream_key(seed: int, stream=()) -> np.ndarray:
    if seed is None:
        raise ValueError("a seed is required")
    entropy = [int(seed)] + [int(s) for s in np.atleast_1d(stream)]
    if min(entropy) < 0:
        raise ValueError("seed and stream tags must be non-negative")
    return np.random.SeedSequence(entropy).generate_state(2, np.uint64)


def uniforms(seed: int, stream, start: int, count: int, width: int) -> np.ndarray:
    """Uniforms in [0, 1) with shape (count, width) for samples start..start+count-1."""
    stride = -(-width // 4) * 4
    bg = np.random.Philox(key=stream_key(seed, stream))
    bg.advance(start * stride // 4)
    return np.random.Generator(bg).random((count, stride))[:, :width]


def worker_count(requested=None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    if requested:
        return max(1, int(requested))
    return 1


def map_samples(func, n_samples: int, args=(), workers=None, chunk: int = CHUNK):
    """Evaluate func(*args, start, count) over fixed chunks and stack the results.

    func must return one array (or a tuple of arrays) with a leading sample axis.
    Chunk boundaries do not depend on the worker count.
    """
    starts = list(range(0, n_samples, chunk))
    counts = [min(chunk, n_samples - s) for s in starts]
    workers = worker_count(workers)
    if workers == 1 or len(starts) == 1:
        parts = [func(*args, s, c) for s, c in zip(starts, counts)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futures = [ex.submit(func, *args, s, c) for s, c in zip(starts, counts)]
            parts = [f.result() for f in futures]
    if not parts:
        return None
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(col) for col in zip(*parts))
    return np.concatenate(parts)


def mean_stderr(values):
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        return float("nan"), float("nan")
    mean = float(values.mean())
    if n == 1:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(n))
