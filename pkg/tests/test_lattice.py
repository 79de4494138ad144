import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oneform import lattice as lt
from oracles import plaquette_edges, star_edges, torus_edges


def test_counts():
    lat = lt.build_torus(2, 2)
    assert (lat.n_edges, lat.n_vertices, lat.n_plaquettes) == (8, 4, 4)
    assert lt.build_torus(4, 3).n_edges == 24


def test_every_edge_in_two_plaquettes():
    lat = lt.build_torus(8, 8)
    counts = np.bincount(lat.plaquette_edges.ravel(), minlength=lat.n_edges)
    assert np.all(counts == 2)


def test_incidence_matches_coordinates():
    for Lx, Ly in [(2, 2), (3, 2), (5, 4)]:
        lat = lt.build_torus(Lx, Ly)
        for (a, b, *_), e in zip(torus_edges(Lx, Ly), range(lat.n_edges)):
            assert set(lat.edge_vertices[e]) == {a, b}
        for py in range(Ly):
            for px in range(Lx):
                assert set(lat.plaquette_edges[py * Lx + px]) == plaquette_edges(Lx, Ly, px, py)


def test_plaquette_origin_convention():
    lat = lt.build_torus(2, 2)
    b = lt.plaquette_boundary(lat, 0)
    assert set(np.flatnonzero(b)) == {0, 1, 4, 3}
    for p in range(lat.n_plaquettes):
        assert lt.plaquette_boundary(lat, p).sum() == 4


def test_plaquette_boundaries_sum_to_zero():
    for Lx, Ly in [(2, 2), (3, 4), (6, 6)]:
        lat = lt.build_torus(Lx, Ly)
        acc = lt.empty_edges(lat)
        for p in range(lat.n_plaquettes):
            acc ^= lt.plaquette_boundary(lat, p)
        assert not acc.any()


def test_crossing_parity_basics():
    lat = lt.build_torus(4, 4)
    c = lat.cycles
    assert lt.crossing_parity(lat, lt.empty_edges(lat), c.C_x) == 1
    assert lt.crossing_parity(lat, c.Cdual_x, c.C_x) == -1
    assert lt.crossing_parity(lat, c.Cdual_y, c.C_y) == -1
    assert lt.crossing_parity(lat, c.Cdual_x, c.C_y) == 1
    # A closed contractible dual loop is a vertex star.
    for v in range(lat.n_vertices):
        b = lt.vertex_star(lat, v)
        assert lt.crossing_parity(lat, b, c.C_x) == 1
        assert lt.crossing_parity(lat, b, c.C_y) == 1


def test_reference_loops_are_closed():
    lat = lt.build_torus(5, 3)
    c = lat.cycles
    # C_x, C_y are closed primal loops; the dual loops carry no syndrome.
    assert not lt.vertex_parity(lat, c.C_x).any()
    assert not lt.vertex_parity(lat, c.C_y).any()
    assert not lt.syndrome(lat, c.Cdual_x).any()
    assert not lt.syndrome(lat, c.Cdual_y).any()


def test_vertex_star_from_coordinates():
    lat = lt.build_torus(4, 3)
    for vy in range(3):
        for vx in range(4):
            assert set(np.flatnonzero(lt.vertex_star(lat, lat.vertex(vx, vy)))) == set(star_edges(4, 3, vx, vy))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), min_size=32, max_size=32), st.integers(0, 15))
def test_homology_invariant_under_star(bits, v):
    lat = lt.build_torus(4, 4)
    e = np.array(bits)
    moved = e ^ lt.vertex_star(lat, v)
    assert lt.homology_class(lat, e) == lt.homology_class(lat, moved)


def test_homology_invariance_1000_trials():
    lat = lt.build_torus(4, 4)
    rng = np.random.default_rng(7)
    for _ in range(1000):
        e = rng.random(lat.n_edges) < 0.3
        b = lt.vertex_star(lat, int(rng.integers(lat.n_vertices)))
        for loop in (lat.cycles.C_x, lat.cycles.C_y):
            assert lt.crossing_parity(lat, e ^ b, loop) == lt.crossing_parity(lat, e, loop)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7), st.integers(2, 7), st.data())
def test_staircase_path_connects_and_is_shortest(Lx, Ly, data):
    lat = lt.build_torus(Lx, Ly)
    a = data.draw(st.integers(0, lat.n_plaquettes - 1))
    b = data.draw(st.integers(0, lat.n_plaquettes - 1))
    path = lt.edge_set(lat, lt.staircase_edges(lat, [a], [b]))
    syn = lt.syndrome(lat, path)
    expect = np.zeros(lat.n_plaquettes, dtype=bool)
    expect[a] ^= True
    expect[b] ^= True
    assert np.array_equal(syn, expect)
    assert path.sum() == lt.torus_distance(lat, a, b)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7), st.integers(2, 7), st.data())
def test_staircase_wraps_match_chain(Lx, Ly, data):
    lat = lt.build_torus(Lx, Ly)
    a = data.draw(st.integers(0, lat.n_plaquettes - 1))
    b = data.draw(st.integers(0, lat.n_plaquettes - 1))
    path = lt.edge_set(lat, lt.staircase_edges(lat, [a], [b]))
    wx, wy = lt.staircase_wraps(lat, np.array([a]), np.array([b]))
    assert int(wx[0]) == int(np.count_nonzero(path & lat.cycles.C_y) % 2)
    assert int(wy[0]) == int(np.count_nonzero(path & lat.cycles.C_x) % 2)


def test_reference_string_classes():
    lat = lt.build_torus(3, 3)
    syn = np.zeros(9, dtype=bool)
    syn[[0, 4]] = True
    for q in lt.CLASSES:
        s = lt.reference_string(lat, syn, q)
        assert np.array_equal(lt.syndrome(lat, s), syn)
        assert lt.homology_class(lat, s) == q


def test_cylinder_structure():
    lat = lt.build_cylinder(4, 6)
    assert lat.n_edges == 2 * 4 * 6 + 6
    assert lat.cycles.C_x is None
    # Boundary-incident edges have one plaquette; every plaquette still has 4 edges.
    assert np.count_nonzero((lat.edge_plaquettes < 0).any(axis=1)) == 2 * 6
    assert lat.plaquette_edges.shape == (24, 4)


def test_cylinder_boundary_path():
    lat = lt.build_cylinder(5, 4)
    for p in range(lat.n_plaquettes):
        e = lt.edge_set(lat, lt.boundary_edges(lat, np.array([p])))
        syn = lt.syndrome(lat, e)
        assert np.flatnonzero(syn).tolist() == [p]
        assert e.sum() == lt.boundary_distance(lat, np.array([p]))[0]


def test_bad_sizes():
    with pytest.raises(ValueError):
        lt.TorusLattice(1, 4)
    with pytest.raises(ValueError):
        lt.TorusLattice(3, 3, "sphere")


def test_header():
    assert lt.build_torus(3, 2).header() == "Lx=3 Ly=2 boundary=torus"
