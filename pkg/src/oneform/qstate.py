"""Exact statevectors on small tori and product-limit error sampling.

Basis state index b has bit e set when edge e is in |1>. Each basis state has a
definite syndrome (plaquette parities of b) and class (parities of b on C_x and
C_y), which is all the binning needs.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from . import lattice as lt
from .rng import uniforms

EXACT_MAX_EDGES = 20


class SizeCapError(ValueError):
    pass


@dataclass
class Statevector:
    amplitudes: np.ndarray
    lat: lt.TorusLattice

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass
class KappaTable:
    """kappa[m, c] for syndrome bitmask m and class index c (order of lattice.CLASSES)."""
    lat: lt.TorusLattice
    values: np.ndarray

    def kappa(self, m: int, q) -> float:
        return float(self.values[m, lt.class_index(q)])

    def syndrome_probabilities(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def rows(self, nonzero_only: bool = False):
        for m in range(self.values.shape[0]):
            for c, (qx, qy) in enumerate(lt.CLASSES):
                k = self.values[m, c]
                if nonzero_only and k == 0:
                    continue
                yield m, qx, qy, float(k)

    def to_csv(self, fh, nonzero_only: bool = False):
        fh.write("m,q_x,q_y,kappa\n")
        for m, qx, qy, k in self.rows(nonzero_only):
            fh.write(f"{m},{qx},{qy},{k!r}\n")


@dataclass
class ErrorSample:
    errors: np.ndarray
    syndrome: np.ndarray
    true_class: Tuple[int, int]
    index: int = 0


def _check_exact(lat):
    if lat.n_edges > EXACT_MAX_EDGES:
        raise SizeCapError(f"exact mode allows at most {EXACT_MAX_EDGES} edges, lattice has {lat.n_edges}")
    if not lat.periodic_x:
        raise ValueError("exact states are built on the torus")


def edge_mask(chain) -> int:
    """Integer bitmask of a boolean edge set."""
    return int(sum(1 << int(e) for e in np.flatnonzero(chain)))


def _popparity(x):
    return (np.bitwise_count(x) & 1).astype(np.int64)


@lru_cache(maxsize=8)
def _tables(Lx: int, Ly: int):
    """Syndrome bitmask and class index for every basis state."""
    lat = lt.build_torus(Lx, Ly)
    idx = np.arange(1 << lat.n_edges, dtype=np.int64)
    syn = np.zeros_like(idx)
    for p in range(lat.n_plaquettes):
        syn |= _popparity(idx & edge_mask(lt.plaquette_boundary(lat, p))) << p
    cx = _popparity(idx & edge_mask(lat.cycles.C_x))
    cy = _popparity(idx & edge_mask(lat.cycles.C_y))
    cls = 2 * cx + cy
    for a in (idx, syn, cls):
        a.setflags(write=False)
    return idx, syn, cls


def basis_tables(lat: lt.TorusLattice):
    _check_exact(lat)
    return _tables(lat.Lx, lat.Ly)


def product_state(lat: lt.TorusLattice, theta: float) -> Statevector:
    """Tensor product of cos(theta/2)|0> + sin(theta/2)|1> on every edge."""
    _check_exact(lat)
    idx = basis_tables(lat)[0]
    ones = np.bitwise_count(idx).astype(np.int64)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    amp = c ** (lat.n_edges - ones) * s ** ones
    return Statevector(amp.astype(float), lat)


def product_angle(g_x: float, g_z: float) -> float:
    """Angle theta with deformed_tc_state(g_x, g_z) == product_state(theta) when g_x^2 + g_z^2 = 1.

    On that circle each factor 1 + g_x X + g_z Z is twice the projector onto
    the spin along (g_x, 0, g_z), which sits at angle atan(g_x / g_z) from +z.
    """
    if abs(g_x ** 2 + g_z ** 2 - 1) > 1e-9:
        raise ValueError("the product limit needs g_x^2 + g_z^2 = 1")
    return float(np.arctan2(g_x, g_z))


def _flip(vec, idx, mask):
    return vec[idx ^ mask]


def toric_ground_state(lat: lt.TorusLattice, sector=(1, 1)) -> Statevector:
    """Toric-code ground state with W_Z eigenvalues (q_x, q_y) = sector."""
    _check_exact(lat)
    if tuple(sector) not in lt.CLASSES:
        raise ValueError(f"invalid sector {sector}")
    idx = basis_tables(lat)[0]
    vec = np.zeros(idx.size)
    vec[0] = 1.0
    for v in range(lat.n_vertices):
        vec = 0.5 * (vec + _flip(vec, idx, edge_mask(lt.vertex_star(lat, v))))
    if sector[0] == -1:
        vec = _flip(vec, idx, edge_mask(lat.cycles.Cdual_x))
    if sector[1] == -1:
        vec = _flip(vec, idx, edge_mask(lat.cycles.Cdual_y))
    return Statevector(vec / np.linalg.norm(vec), lat)


def deformed_tc_state(lat: lt.TorusLattice, g_x: float, g_z: float, sector=(1, 1)) -> Statevector:
    """prod_e (1 + g_x X_e + g_z Z_e) |TC>, normalized, with a real non-negative |0...0> amplitude."""
    _check_exact(lat)
    if g_x < 0 or g_z < 0 or g_x ** 2 + g_z ** 2 > 1 + 1e-12:
        raise ValueError("need g_x, g_z >= 0 and g_x^2 + g_z^2 <= 1")
    idx = basis_tables(lat)[0]
    vec = toric_ground_state(lat, sector).amplitudes.astype(float)
    for e in range(lat.n_edges):
        sign = 1 - 2 * ((idx >> e) & 1)
        vec = vec + g_x * vec[idx ^ (1 << e)] + g_z * sign * vec
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("deformation annihilates the state")
    vec = vec / nrm
    if vec[0] < 0:
        vec = -vec
    return Statevector(vec, lat)


def kappa_exact(state: Statevector, lat: Optional[lt.TorusLattice] = None) -> KappaTable:
    """kappa_{m,q} = <psi|P_{m,q}|psi> by binning basis-state probabilities."""
    lat = lat or state.lat
    _, syn, cls = basis_tables(lat)
    if state.amplitudes.size != syn.size:
        raise ValueError("state does not match the lattice")
    n_syn = 1 << lat.n_plaquettes
    flat = np.bincount(syn * 4 + cls, weights=state.probabilities(), minlength=n_syn * 4)
    return KappaTable(lat, flat.reshape(n_syn, 4))


def sum_max_kappa(table: KappaTable) -> float:
    """Sum over syndromes of max_q kappa_{m,q}."""
    return float(table.values.max(axis=1).sum())


def syndrome_mask(defects) -> int:
    return int(sum(1 << int(p) for p in np.flatnonzero(defects)))


def mask_to_syndrome(lat: lt.TorusLattice, m: int) -> np.ndarray:
    return np.array([(m >> p) & 1 for p in range(lat.n_plaquettes)], dtype=bool)


def z_string_expectation(state: Statevector, chain) -> float:
    """<prod_{e in chain} Z_e> (diagonal in the computational basis)."""
    idx = basis_tables(state.lat)[0]
    sign = 1 - 2 * _popparity(idx & edge_mask(chain))
    return float(np.dot(state.probabilities(), sign))


def fm_string_order(state: Statevector, lat, half_path, full_loop) -> float:
    """<Z on half_path> / sqrt(<Z on full_loop>); nan when the denominator is not positive."""
    half_path = np.asarray(half_path, dtype=bool)
    full_loop = np.asarray(full_loop, dtype=bool)
    if np.any(half_path & ~full_loop):
        raise ValueError("half_path must lie inside full_loop")
    if 2 * half_path.sum() != full_loop.sum():
        raise ValueError("half_path must cover half of full_loop")
    if lt.vertex_parity(lat, full_loop).any():
        raise ValueError("full_loop is not closed")
    den = z_string_expectation(state, full_loop)
    if den <= 0:
        return float("nan")
    return z_string_expectation(state, half_path) / np.sqrt(den)


def ml_class_table(table: KappaTable) -> np.ndarray:
    """Most likely class index per syndrome; ties go to the earlier class."""
    return np.argmax(table.values, axis=1)


def _recovery_fn(state, lat, decoder):
    if callable(decoder):
        return lambda syn: decoder(lat, syn)
    if decoder == "ml":
        best = ml_class_table(kappa_exact(state, lat))

        def ml(syn):
            return lt.reference_string(lat, syn, lt.CLASSES[best[syndrome_mask(syn)]])
        return ml
    if decoder == "mwpm":
        from .decode import mwpm_decode
        return lambda syn: mwpm_decode(lat, syn).recovery
    raise ValueError(f"unknown decoder {decoder!r}")


def qec_recovered_expectation(state: Statevector, lat, decoder, observable) -> float:
    """Average of the Z-string observable over syndrome outcomes after recovery.

    decoder is "ml" (argmax_q kappa_{m,q} of this state), "mwpm", or a callable
    (lat, syndrome) -> recovery chain.
    """
    idx, syn, _ = basis_tables(lat)
    recover = _recovery_fn(state, lat, decoder)
    obs = edge_mask(observable)
    probs = state.probabilities()
    total = 0.0
    for m in np.unique(syn):
        sel = syn == m
        r = edge_mask(recover(mask_to_syndrome(lat, int(m))))
        sign = 1 - 2 * _popparity((idx[sel] ^ r) & obs)
        total += float(np.dot(probs[sel], sign))
    return total


def error_batch(lat: lt.TorusLattice, p: float, seed: int, start: int, count: int, stream=0) -> np.ndarray:
    """Boolean error masks of shape (count, N_e), each edge flipped with probability p."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return uniforms(seed, stream, start, count, lat.n_edges) < p


def make_sample(lat: lt.TorusLattice, errors, index: int = 0) -> ErrorSample:
    errors = np.asarray(errors, dtype=bool)
    cls = lt.homology_class(lat, errors) if lat.periodic_x else None
    return ErrorSample(errors, lt.syndrome(lat, errors), cls, index)


def sample_errors(lat: lt.TorusLattice, p: float, seed: int, index: int = 0, stream=0) -> ErrorSample:
    return make_sample(lat, error_batch(lat, p, seed, index, 1, stream)[0], index)


def write_sample_records(fh, samples):
    """One line per sample: index;error edges;defect plaquettes;q_x q_y."""
    for s in samples:
        errs = " ".join(map(str, np.flatnonzero(s.errors)))
        defs = " ".join(map(str, np.flatnonzero(s.syndrome)))
        fh.write(f"{s.index};{errs};{defs};{s.true_class[0]} {s.true_class[1]}\n")


def read_sample_records(fh, lat: lt.TorusLattice):
    out = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        index, errs, defs, cls = line.split(";")
        errors = lt.edge_set(lat, [int(e) for e in errs.split()])
        s = make_sample(lat, errors, int(index))
        if sorted(np.flatnonzero(s.syndrome)) != sorted(int(d) for d in defs.split()):
            raise ValueError(f"record {index}: syndrome does not match errors")
        if s.true_class != tuple(int(q) for q in cls.split()):
            raise ValueError(f"record {index}: class does not match errors")
        out.append(s)
    return out
