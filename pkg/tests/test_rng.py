import numpy as np
import pytest

from oneform import rng


def _chunk(seed, start, count):
    return rng.uniforms(seed, (9,), start, count, 5).sum(axis=1)


def test_uniforms_chunk_invariant():
    whole = rng.uniforms(3, (1, 2), 0, 50, 7)
    parts = np.concatenate([rng.uniforms(3, (1, 2), s, 10, 7) for s in range(0, 50, 10)])
    assert np.array_equal(whole, parts)
    assert whole.min() >= 0 and whole.max() < 1


def test_streams_differ():
    assert not np.array_equal(rng.uniforms(3, 1, 0, 4, 4), rng.uniforms(3, 2, 0, 4, 4))


def test_seed_required():
    with pytest.raises(ValueError):
        rng.stream_key(None)


def test_map_samples_worker_invariant(monkeypatch):
    monkeypatch.delenv(rng.WORKERS_ENV, raising=False)
    one = rng.map_samples(_chunk, 5000, (4,), workers=1, chunk=512)
    two = rng.map_samples(_chunk, 5000, (4,), workers=2, chunk=512)
    assert np.array_equal(one, two)
    assert np.array_equal(one, _chunk(4, 0, 5000))


def test_worker_env_override(monkeypatch):
    monkeypatch.setenv(rng.WORKERS_ENV, "3")
    assert rng.worker_count(8) == 3


def test_mean_stderr():
    m, e = rng.mean_stderr([1, -1, 1, -1])
    assert m == 0 and e == pytest.approx(np.std([1, -1, 1, -1], ddof=1) / 2)
