"""1D chains: product-state decodability, Ising and cluster ground states, majority-vote decoding.

Basis index b has bit i set when site i is |1> (Z_i = -1). Chains are periodic.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .rng import uniforms

MAX_SITES = 16
DENSE_MAX_SITES = 10
DEGENERACY_RATIO = 0.1


@dataclass
class ChainState:
    amplitudes: np.ndarray
    L: int
    params: dict = field(default_factory=dict)
    energy: float = float("nan")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def criterion_1d(theta: float, L: int) -> float:
    """Sum over domain-wall patterns of the larger of the two class weights.

    cos^{2L}(theta/2) sum_{i < L/2} C(L, i) tan^{2i}(theta/2), plus half of the
    i = L/2 term, where each complementary pair is one pattern.
    """
    if L % 2 or L < 2:
        raise ValueError("L must be a positive even integer")
    if not 0 <= theta <= math.pi / 2 + 1e-15:
        raise ValueError("theta must lie in [0, pi/2]")
    c2, s2 = math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2
    terms = [math.comb(L, i) * c2 ** (L - i) * s2 ** i for i in range(L // 2)]
    terms.append(0.5 * math.comb(L, L // 2) * (c2 * s2) ** (L // 2))
    return math.fsum(terms)


def domain_walls(bits) -> np.ndarray:
    """Positions i with b_i != b_{i+1} on the ring."""
    bits = np.asarray(bits, dtype=bool)
    return np.flatnonzero(bits ^ np.roll(bits, -1))


def _basis(L):
    idx = np.arange(1 << L, dtype=np.int64)
    z = 1 - 2 * ((idx[:, None] >> np.arange(L)) & 1)
    return idx, z


def _flip_terms(L, idx, coeff):
    rows, cols = [], []
    for i in range(L):
        rows.append(idx)
        cols.append(idx ^ (1 << i))
    return np.concatenate(rows), np.concatenate(cols), np.full(L * idx.size, coeff)


def ising_hamiltonian(L: int, h_x: float, h_z: float) -> sp.csr_matrix:
    """-sum Z_i Z_{i+1} - h_x sum X_i - h_z sum Z_i on a ring."""
    if L > MAX_SITES:
        raise ValueError(f"at most {MAX_SITES} sites")
    idx, z = _basis(L)
    diag = -(z * np.roll(z, -1, axis=1)).sum(axis=1) - h_z * z.sum(axis=1)
    r, c, v = _flip_terms(L, idx, -h_x)
    h = sp.coo_matrix((v, (r, c)), shape=(idx.size, idx.size)) + sp.diags(diag.astype(float))
    return h.tocsr()


def cluster_hamiltonian_measured(L: int, delta: float) -> sp.csr_matrix:
    """The cluster chain written in the basis where bit i records the stabilizer K_i.

    K_i = Z_{i-1} X_i Z_{i+1}. Conjugating by the CZ ring and by Hadamards maps
    -(1 - delta) sum X_i - delta sum K_i to -delta sum Z_i - (1 - delta) sum X_{i-1} Z_i X_{i+1},
    so a Z-basis bit equal to 1 is a charge (K_i = -1).
    """
    if L > MAX_SITES:
        raise ValueError(f"at most {MAX_SITES} sites")
    if L < 3:
        raise ValueError("need at least 3 sites")
    idx, z = _basis(L)
    diag = -delta * z.sum(axis=1)
    rows, cols, vals = [], [], []
    for i in range(L):
        flip = (1 << ((i - 1) % L)) | (1 << ((i + 1) % L))
        rows.append(idx)
        cols.append(idx ^ flip)
        vals.append(-(1 - delta) * z[:, i])
    h = sp.coo_matrix((np.concatenate(vals).astype(float), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(idx.size, idx.size)) + sp.diags(diag.astype(float))
    return h.tocsr()


def _lowest(h, k):
    n = h.shape[0]
    if n <= (1 << DENSE_MAX_SITES):
        w, v = np.linalg.eigh(h.toarray())
        return w[:k], v[:, :k]
    w, v = eigsh(h, k=k, which="SA", tol=1e-12, v0=np.ones(n) / np.sqrt(n))
    order = np.argsort(w)
    return w[order], v[:, order]


def ising_ground_state(L: int, h_x: float, h_z: float, symmetry_breaking: bool = True) -> ChainState:
    """Lowest eigenvector of the Ising ring.

    At h_z = 0 the two lowest levels form a quasi-degenerate doublet in the
    ordered phase. When their splitting is below DEGENERACY_RATIO times the gap
    to the next level, the doublet is rotated to the combination with maximal
    positive magnetization (the state an infinitesimal longitudinal field
    selects). With symmetry_breaking=False the parity-even state is returned.
    """
    if L > MAX_SITES or L < 2:
        raise ValueError(f"need 2 <= L <= {MAX_SITES}")
    h = ising_hamiltonian(L, h_x, h_z)
    w, v = _lowest(h, 3)
    psi = v[:, 0]
    if h_z == 0 and symmetry_breaking and (w[1] - w[0]) < DEGENERACY_RATIO * (w[2] - w[1]):
        _, z = _basis(L)
        mag = z.sum(axis=1).astype(float)
        sub = v[:, :2]
        m = sub.T @ (mag[:, None] * sub)
        evals, evecs = np.linalg.eigh(m)
        psi = sub @ evecs[:, -1]
    psi = psi / np.linalg.norm(psi)
    k = np.argmax(np.abs(psi))
    psi = psi * np.sign(psi[k])
    return ChainState(psi, L, {"h_x": h_x, "h_z": h_z}, float(w[0]))


def cluster_ground_state(L: int, delta: float) -> ChainState:
    """Ground state of the cluster chain in the stabilizer-measurement basis."""
    w, v = _lowest(cluster_hamiltonian_measured(L, delta), 1)
    psi = v[:, 0] / np.linalg.norm(v[:, 0])
    k = np.argmax(np.abs(psi))
    return ChainState(psi * np.sign(psi[k]), L, {"delta": delta}, float(w[0]))


def sample_bitstrings(state: ChainState, n_samples: int, seed: int, start: int = 0, stream=0) -> np.ndarray:
    """Basis indices drawn from |psi|^2, one uniform per sample."""
    cdf = np.cumsum(state.probabilities())
    cdf /= cdf[-1]
    u = uniforms(seed, stream, start, n_samples, 1)[:, 0]
    return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)


def majority_values(indices, L: int) -> np.ndarray:
    """Single-site Z on the recovered state for each sample.

    The recovery flips the minority of the two complementary strings, leaving
    |0...0> (+1) or |1...1> (-1); an exact tie scores 0.
    """
    ones = np.bitwise_count(np.asarray(indices, dtype=np.int64)).astype(np.int64)
    return np.sign(L - 2 * ones)


def majority_indicator(state: ChainState, n_samples: int, seed: int, stream=0):
    """Mean and standard error of the post-recovery Z over sampled bitstrings."""
    vals = majority_values(sample_bitstrings(state, n_samples, seed, stream=stream), state.L)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0


def majority_indicator_exact(state: ChainState) -> float:
    idx = np.arange(state.amplitudes.size)
    return float(np.dot(state.probabilities(), majority_values(idx, state.L)))


def rg1d_majority(bits, rounds: int) -> np.ndarray:
    """Replace disjoint 3-blocks by their majority bit, `rounds` times."""
    bits = np.asarray(bits, dtype=bool)
    if bits.shape[-1] % (3 ** rounds):
        raise ValueError("length must be divisible by 3**rounds")
    for _ in range(rounds):
        bits = bits.reshape(bits.shape[:-1] + (-1, 3)).sum(axis=-1) >= 2
    return bits


def _ring_choice(charges, n):
    """Pick the shorter of the two string classes joining sorted charges on an n-site ring.

    Returns (runs, uses_last_link): runs is a list of (start, length) link runs,
    where link k joins sites k and k + 1. Ties go to the class pairing
    (q0, q1), (q2, q3), ...
    """
    q = np.sort(np.asarray(charges, dtype=np.int64))
    if q.size == 0:
        return [], False
    a_len = int(np.sum(q[1::2] - q[0::2]))
    if a_len <= n - a_len:
        return [(int(q[i]), int(q[i + 1] - q[i])) for i in range(0, q.size, 2)], False
    runs = [(int(q[i]), int(q[i + 1] - q[i])) for i in range(1, q.size - 1, 2)]
    runs.append((int(q[-1]), int(q[0] + n - q[-1])))
    return runs, True


def subsystem_agreement(charges, n: int, n_a: int) -> bool:
    """Two-stage pairing on one sublattice ring of n sites with subsystem sites 0..n_a-1.

    The second ring glues site n_a - 1 to site 0; its last link is the seam.
    The two recoveries agree when both or neither cross the seam.
    """
    runs, _ = _ring_choice(charges, n)
    kept = []
    seam = 0
    for start, length in runs:
        end = (start + length) % n
        in_a = (start < n_a, end < n_a)
        if all(in_a):
            kept += [start, end]
            # A run between two subsystem sites that leaves the subsystem passes the seam once.
            if start + length > n_a - 1:
                seam ^= 1
    _, second_seam = _ring_choice(kept, n_a)
    return seam == int(second_seam)


def spt_agreements(indices, L_total: int, L_sub: int) -> np.ndarray:
    """1 when both sublattices agree, else 0, for each sampled charge pattern."""
    n, n_a = L_total // 2, L_sub // 2
    out = np.empty(len(indices), dtype=np.int64)
    for j, b in enumerate(indices):
        ok = True
        for s in (0, 1):
            charges = [k for k in range(n) if (b >> (2 * k + s)) & 1]
            ok &= subsystem_agreement(charges, n, n_a)
        out[j] = int(ok)
    return out


def spt_subsystem_indicator(delta: float, L_total: int, L_sub: int, n_samples: int, seed: int, stream=0):
    """Probability that full-ring and folded-subsystem recoveries agree, with standard error."""
    if L_total % 2 or L_sub % 2 or not 2 <= L_sub < L_total:
        raise ValueError("need even 2 <= L_sub < L_total")
    state = cluster_ground_state(L_total, delta)
    idx = sample_bitstrings(state, n_samples, seed, stream=stream)
    vals = spt_agreements(idx, L_total, L_sub)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
