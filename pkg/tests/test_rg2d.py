import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oneform import decode as dc
from oneform import lattice as lt
from oneform import qstate as qs
from oneform import rg2d


def _closed(n, rng, density=0.5):
    """Random closed configuration: a product of random vertex stars (plus optional winding loops)."""
    lat = lt.build_torus(n, n)
    chain = np.zeros(lat.n_edges, dtype=bool)
    for v in np.flatnonzero(rng.random(lat.n_vertices) < density):
        chain ^= lt.vertex_star(lat, v)
    if rng.random() < 0.5:
        chain ^= lat.cycles.Cdual_x
    if rng.random() < 0.5:
        chain ^= lat.cycles.Cdual_y
    return chain.reshape(n, n, 2)


def test_zero_grid_fixed():
    z = np.zeros((8, 8, 2), dtype=bool)
    assert not rg2d.rg_step_array(z).any()
    assert np.all(rg2d.probe_values(z[None], 2) == 1)


def test_single_star_vanishes_after_one_step():
    rng = np.random.default_rng(0)
    lat = lt.build_torus(8, 8)
    for v in rng.choice(64, 10, replace=False):
        star = lt.vertex_star(lat, v).reshape(8, 8, 2)
        out = rg2d.rg_step_array(star)
        # A star is a single flipped vertex spin; a 3-spin majority never lets it survive.
        assert not out.any()


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([4, 8, 16]), st.integers(0, 2 ** 32 - 1))
def test_closure_preserved(n, seed):
    bits = _closed(n, np.random.default_rng(seed))
    out = rg2d.rg_step_array(bits)
    assert out.shape == (n // 2, n // 2, 2)
    assert not rg2d.plaquette_parity(out).any()


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([4, 8, 16]), st.integers(0, 2 ** 32 - 1))
def test_star_step_is_majority_coboundary(n, seed):
    rng = np.random.default_rng(seed)
    lat = lt.build_torus(n, n)
    spins = rng.random((n, n)) < 0.5
    bits = np.zeros(lat.n_edges, dtype=bool)
    for y, x in zip(*np.nonzero(spins)):
        bits ^= lt.vertex_star(lat, lat.vertex(x, y))
    bits = bits.reshape(n, n, 2)
    s = spins[0::2, 0::2].astype(int) + spins[0::2, 1::2] + spins[1::2, 0::2]
    coarse = s >= 2
    m = n // 2
    expect = np.zeros((m, m, 2), dtype=bool)
    expect[..., lt.EAST] = coarse ^ np.roll(coarse, -1, axis=1)
    expect[..., lt.NORTH] = coarse ^ np.roll(coarse, -1, axis=0)
    assert np.array_equal(rg2d.rg_step_array(bits), expect)


def test_winding_loops_survive():
    lat = lt.build_torus(8, 8)
    loop = lat.cycles.Cdual_x.reshape(8, 8, 2)
    out = rg2d.rg_step_array(loop)
    assert out.sum() == 4 and not rg2d.plaquette_parity(out).any()


def test_rejects_open_strings_and_bad_shapes():
    bits = np.zeros((8, 8, 2), dtype=bool)
    bits[0, 0, lt.EAST] = True
    with pytest.raises(ValueError):
        rg2d.rg_step_array(bits)
    with pytest.raises(ValueError):
        rg2d.rg_step_array(np.zeros((6, 8, 2), dtype=bool))
    with pytest.raises(ValueError):
        rg2d.probe_values(np.zeros((1, 8, 8, 2), dtype=bool), 3)


def _corrected(L, theta, n, seed):
    lat = lt.build_torus(L, L)
    e = qs.error_batch(lat, float(np.sin(theta / 2) ** 2), seed, 0, n)
    out = np.empty_like(e)
    for i, row in enumerate(e):
        out[i] = row ^ dc.mwpm_decode(lat, lt.syndrome(lat, row)).recovery
    return out.reshape(n, L, L, 2)


def test_theta_zero_gives_one():
    vals = rg2d.probe_values(_corrected(16, 0.0, 20, 1), 3)
    assert np.all(vals == 1)


def test_half_pi_is_disordered():
    vals = rg2d.probe_values(_corrected(16, np.pi / 2, 400, 2), 3)
    assert abs(vals[:, -1].mean()) < 0.15


def test_ordered_side_grows():
    vals = rg2d.probe_values(_corrected(16, 0.15 * np.pi, 400, 3), 3)
    m = vals.mean(axis=0)
    assert m[-1] > m[0] and m[-1] > 0.9
    assert np.all(np.abs(m) <= 1)


def test_disorder_parameter_and_bitgrid():
    lat = lt.build_torus(8, 8)
    g = rg2d.grid_from_chain(lat, lat.cycles.Cdual_y)
    g2 = rg2d.rg_step(g)
    assert g2.rounds == 1 and g2.size == 4
    mean, err = rg2d.disorder_parameter([g, g], 1)
    assert -1 <= mean <= 1 and err == 0
    assert rg2d.max_rounds(32) == 4
