import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oneform import chain1d as ch
from oracles import criterion_bruteforce, pauli_x, pauli_z, ring_agreement, tfim_free_fermion_energy

THETAS = [0.0, 0.1 * math.pi, 0.25 * math.pi, 0.4 * math.pi, 0.5 * math.pi]


@pytest.mark.parametrize("L", [2, 4, 6, 8, 10, 12, 14])
def test_criterion_matches_bruteforce(L):
    for t in THETAS:
        assert abs(ch.criterion_1d(t, L) - criterion_bruteforce(t, L)) <= 1e-12


def test_criterion_endpoints_and_monotone():
    assert ch.criterion_1d(0.0, 10) == 1.0
    assert ch.criterion_1d(math.pi / 2, 8) == pytest.approx(0.5, abs=1e-15)
    vals = [ch.criterion_1d(t, 12) for t in np.linspace(0, math.pi / 2, 30)]
    assert np.all(np.diff(vals) <= 1e-15)


def test_criterion_validation():
    with pytest.raises(ValueError):
        ch.criterion_1d(0.1, 7)
    with pytest.raises(ValueError):
        ch.criterion_1d(2.0, 8)


@pytest.mark.parametrize("L,h", [(6, 0.5), (8, 1.0), (10, 1.7), (12, 0.3), (12, 2.0)])
def test_ising_energy_free_fermions(L, h):
    assert ch.ising_ground_state(L, h, 0.0).energy == pytest.approx(tfim_free_fermion_energy(L, h), abs=1e-9)


def test_sparse_solver_matches_dense():
    from scipy.sparse.linalg import eigsh
    h = ch.ising_hamiltonian(10, 0.8, 0.1)
    dense = np.linalg.eigvalsh(h.toarray())[:3]
    sparse = np.sort(eigsh(h, k=3, which="SA", tol=1e-12)[0])
    assert np.allclose(dense, sparse, atol=1e-9)


def test_ising_limits():
    up = ch.ising_ground_state(8, 0.0, 0.5)
    assert up.probabilities()[0] == pytest.approx(1.0, abs=1e-12)
    para = ch.ising_ground_state(8, 50.0, 0.0)
    idx = np.arange(1 << 8)
    x1 = float(np.dot(para.amplitudes, para.amplitudes[idx ^ 1]))
    assert x1 > 0.999


def test_hamiltonian_against_dense_paulis():
    L = 5
    h = sum(-pauli_z(L, i) @ pauli_z(L, (i + 1) % L) - 0.7 * pauli_x(L, i) - 0.2 * pauli_z(L, i) for i in range(L))
    assert np.allclose(ch.ising_hamiltonian(L, 0.7, 0.2).toarray(), h)


def test_flip_antisymmetry():
    L = 10
    s = ch.ising_ground_state(L, 0.6, 0.0)
    flipped = ch.ChainState(s.amplitudes[::-1].copy(), L)
    assert ch.majority_indicator_exact(flipped) == pytest.approx(-ch.majority_indicator_exact(s), abs=1e-12)


def test_ordered_and_field_cases():
    assert ch.majority_indicator_exact(ch.ising_ground_state(10, 0.2, 0.0)) > 0.99
    sym = ch.ising_ground_state(10, 0.2, 0.0, symmetry_breaking=False)
    # The doublet splitting is about h_x^L, so the eigensolver mixes the pair at that scale.
    assert abs(ch.majority_indicator_exact(sym)) < 1e-5
    a = ch.majority_indicator_exact(ch.ising_ground_state(8, 2.0, 0.2))
    b = ch.majority_indicator_exact(ch.ising_ground_state(12, 2.0, 0.2))
    assert b > a > 0


def test_sampled_indicator_matches_exact():
    s = ch.ising_ground_state(10, 1.2, 0.1)
    mean, err = ch.majority_indicator(s, 20000, seed=3)
    assert abs(mean - ch.majority_indicator_exact(s)) < 4 * err


@given(st.lists(st.booleans(), min_size=2, max_size=20))
def test_domain_walls_even(bits):
    assert ch.domain_walls(bits).size % 2 == 0


def test_rg1d_majority():
    bits = [0, 0, 0, 1, 1, 1, 0, 0, 0]
    assert ch.rg1d_majority(bits, 1).astype(int).tolist() == [0, 1, 0]
    assert ch.rg1d_majority(bits, 2).astype(int).tolist() == [0]
    with pytest.raises(ValueError):
        ch.rg1d_majority([0, 1], 1)


def test_majority_values_ties():
    assert ch.majority_values([0, 0b1111, 0b0011], 4).tolist() == [1, -1, 0]


def _cluster_charge_distribution(L, delta):
    """Dense original Hamiltonian; distribution of stabilizer-eigenvalue patterns."""
    ks = [pauli_z(L, (i - 1) % L) @ pauli_x(L, i) @ pauli_z(L, (i + 1) % L) for i in range(L)]
    h = sum(-(1 - delta) * pauli_x(L, i) - delta * ks[i] for i in range(L))
    w, v = np.linalg.eigh(h)
    psi = v[:, 0]
    out = np.zeros(1 << L)
    for b in range(1 << L):
        proj = np.eye(1 << L)
        for i in range(L):
            sign = -1 if (b >> i) & 1 else 1
            proj = proj @ (0.5 * (np.eye(1 << L) + sign * ks[i]))
        out[b] = psi @ proj @ psi
    return w[0], out


@pytest.mark.parametrize("delta", [0.2, 0.5, 0.8])
def test_cluster_basis_against_dense(delta):
    e0, dist = _cluster_charge_distribution(6, delta)
    s = ch.cluster_ground_state(6, delta)
    assert s.energy == pytest.approx(e0, abs=1e-10)
    assert np.allclose(s.probabilities(), dist, atol=1e-10)


def test_spt_limits():
    mean, _ = ch.spt_subsystem_indicator(1.0, 12, 6, 200, seed=1)
    assert mean == 1.0
    with pytest.raises(ValueError):
        ch.spt_subsystem_indicator(0.5, 12, 12, 10, seed=1)


def test_ring_agreement_oracle():
    for n in range(2, 9):
        for n_a in range(1, n):
            for k in range(0, n + 1, 2):
                for charges in itertools.combinations(range(n), k):
                    assert ch.subsystem_agreement(list(charges), n, n_a) == ring_agreement(charges, n, n_a)


def test_spt_agreements_split_sublattices():
    # Charges at sites 0 and 2 sit on sublattice 0 at ring positions 0 and 1.
    assert ch.spt_agreements([0b101], 8, 4).tolist() == [1]
