"""Decoders mapping a plaquette syndrome to an X recovery chain.

mwpm: minimum-weight perfect matching on the dual graph (pymatching's exact
      blossom), with recovery paths drawn by lattice.staircase_edges.
local: 2x2 block renormalization decoder (power-of-2 sizes).
ml: exact maximum likelihood over the four classes via RBIM partition functions.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import pymatching

from . import lattice as lt
from . import rbim
from .qstate import ErrorSample, syndrome_mask

DECODERS = ("mwpm", "local", "ml")


@dataclass
class DecodeResult:
    recovery: np.ndarray
    homology: Optional[Tuple[int, int]]
    decoder: str
    cost: Optional[int] = None
    pairs: Optional[np.ndarray] = None
    to_boundary: Optional[np.ndarray] = None


def _check_syndrome(lat, syn):
    syn = np.asarray(syn, dtype=bool)
    if syn.shape != (lat.n_plaquettes,):
        raise ValueError(f"syndrome has shape {syn.shape}, expected ({lat.n_plaquettes},)")
    if lat.periodic_x and np.count_nonzero(syn) % 2:
        raise ValueError("odd number of defects on a torus")
    return syn


@lru_cache(maxsize=32)
def _matching(Lx: int, Ly: int, boundary: str) -> pymatching.Matching:
    lat = lt.TorusLattice(Lx, Ly, boundary)
    m = pymatching.Matching()
    for a, b in lat.edge_plaquettes:
        if b < 0:
            m.add_boundary_edge(int(a), weight=1.0, merge_strategy="smallest-weight")
        else:
            m.add_edge(int(a), int(b), weight=1.0, merge_strategy="smallest-weight")
    return m


def mwpm_pairs(lat: lt.TorusLattice, syn):
    """Matched defect pairs (k, 2) sorted lexicographically, plus defects matched to the boundary."""
    syn = np.asarray(syn, dtype=bool)
    if not syn.any():
        return np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64)
    matched = _matching(lat.Lx, lat.Ly, lat.boundary).decode_to_matched_dets_array(syn)
    matched = np.asarray(matched, dtype=np.int64).reshape(-1, 2)
    single = (matched < 0).any(axis=1)
    to_boundary = np.sort(matched[single].max(axis=1))
    pairs = np.sort(matched[~single], axis=1)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    return pairs, to_boundary


def matching_cost(lat, pairs, to_boundary=()) -> int:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    cost = int(lt.torus_distance(lat, pairs[:, 0], pairs[:, 1]).sum())
    if len(to_boundary):
        cost += int(lt.boundary_distance(lat, np.asarray(to_boundary)).sum())
    return cost


def mwpm_decode(lat: lt.TorusLattice, syndrome) -> DecodeResult:
    """Minimum total distance pairing; on the cylinder defects may end on a rough boundary."""
    syn = _check_syndrome(lat, syndrome)
    pairs, to_boundary = mwpm_pairs(lat, syn)
    recovery = lt.pairs_chain(lat, pairs, to_boundary)
    homology = lt.homology_class(lat, recovery) if lat.periodic_x else None
    return DecodeResult(recovery, homology, "mwpm", matching_cost(lat, pairs, to_boundary),
                        pairs, to_boundary)


def pairs_class_flips(lat, pairs):
    """Parities of the staircase recovery on C_x and C_y, without building the chain."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    wx, wy = lt.staircase_wraps(lat, pairs[:, 0], pairs[:, 1])
    return int(np.count_nonzero(wy) % 2), int(np.count_nonzero(wx) % 2)


def mwpm_batch(lat: lt.TorusLattice, errors: np.ndarray):
    """Decode a stack of error masks on the torus.

    Returns integer arrays (defects, cost, w_x, w_y), one entry per row.
    """
    errors = np.asarray(errors, dtype=bool)
    syn = lt.syndrome(lat, errors)
    cx = np.count_nonzero(errors & lat.cycles.C_x, axis=1) % 2
    cy = np.count_nonzero(errors & lat.cycles.C_y, axis=1) % 2
    n = errors.shape[0]
    cost = np.zeros(n, dtype=np.int64)
    fx = np.zeros(n, dtype=np.int64)
    fy = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if syn[i].any():
            pairs, _ = mwpm_pairs(lat, syn[i])
            cost[i] = matching_cost(lat, pairs)
            fx[i], fy[i] = pairs_class_flips(lat, pairs)
    w_x = 1 - 2 * ((cx + fx) % 2)
    w_y = 1 - 2 * ((cy + fy) % 2)
    return np.count_nonzero(syn, axis=1), cost, w_x, w_y


def _is_pow2(n):
    return n >= 2 and n & (n - 1) == 0


def local_decode(lat: lt.TorusLattice, syndrome, max_rounds: Optional[int] = None,
                 track_recovery: bool = True):
    """Block renormalization decoder.

    Each round treats 2x2 blocks at offset (0, 0) and removes every block that
    holds an even number of charges, then 2x2 blocks at offset (1, 1), where
    even counts are removed and odd counts are fused onto the block's lower-left
    cell. The offset blocks become the plaquettes of the next, half-size
    lattice. Returns the charge density after each round and a partial result
    whose recovery removes every charge cleared so far.
    """
    syn = _check_syndrome(lat, syndrome)
    if not (_is_pow2(lat.Lx) and _is_pow2(lat.Ly)):
        raise ValueError("local decoder needs power-of-2 lattice sizes")
    full = int(math.log2(min(lat.Lx, lat.Ly))) - 1
    rounds = full if max_rounds is None else min(int(max_rounds), full)
    grid = syn.reshape(lat.Ly, lat.Lx).copy()
    edges = []
    densities = []
    for k in range(rounds):
        scale, origin = 1 << k, (1 << k) - 1
        ny, nx = grid.shape

        def rep(cx, cy):
            return lat.plaquette((origin + scale * cx) % lat.Lx, (origin + scale * cy) % lat.Ly)

        def clear(cells):
            # Pair consecutive charges inside one block.
            cells = [rep(cx, cy) for cy, cx in cells]
            if track_recovery and cells:
                edges.append(lt.staircase_edges(lat, cells[0::2], cells[1::2]))

        blocks = grid.reshape(ny // 2, 2, nx // 2, 2)
        counts = blocks.sum(axis=(1, 3))
        even = (counts % 2 == 0) & (counts > 0)
        for J, I in zip(*np.nonzero(even)):
            cells = [(2 * J + a, 2 * I + b) for a in (0, 1) for b in (0, 1) if blocks[J, a, I, b]]
            clear(cells)
            blocks[J, :, I, :] = False
        grid = blocks.reshape(ny, nx)

        shifted = np.roll(grid, (-1, -1), axis=(0, 1)).reshape(ny // 2, 2, nx // 2, 2)
        counts = shifted.sum(axis=(1, 3))
        for J, I in zip(*np.nonzero(counts)):
            cells = [((2 * J + 1 + a) % ny, (2 * I + 1 + b) % nx)
                     for a in (0, 1) for b in (0, 1) if shifted[J, a, I, b]]
            if counts[J, I] % 2:
                corner = ((2 * J + 1) % ny, (2 * I + 1) % nx)
                cells = [c for c in cells if c != corner] if corner in cells else [corner] + cells
            clear(cells)
        grid = (counts % 2).astype(bool)
        densities.append(grid.sum() / grid.size)
    recovery = lt.edge_set(lat, np.concatenate(edges)) if edges else lt.empty_edges(lat)
    return np.array(densities), DecodeResult(recovery, None, "local")


def local_densities(lat: lt.TorusLattice, errors: np.ndarray, max_rounds: Optional[int] = None):
    """Residual charge density per round for a stack of error masks, shape (n, rounds)."""
    syn = lt.syndrome(lat, np.asarray(errors, dtype=bool))
    return np.array([local_decode(lat, s, max_rounds, track_recovery=False)[0] for s in syn])


@lru_cache(maxsize=4096)
def _ml_cached(Lx, Ly, p, mask):
    lat = lt.build_torus(Lx, Ly)
    syn = np.array([(mask >> i) & 1 for i in range(lat.n_plaquettes)], dtype=bool)
    lz = rbim.sector_log_partitions(lat, rbim.nishimori_coupling(p), syn)
    top = lz.max()
    return int(np.flatnonzero(lz >= top - 1e-12 * max(1.0, abs(top)))[0])


def ml_decode(lat: lt.TorusLattice, syndrome, p: float) -> Tuple[int, int]:
    """Most likely class of the error chain given the syndrome (ties in CLASSES order)."""
    syn = _check_syndrome(lat, syndrome)
    if not lat.periodic_x:
        raise ValueError("ml decoding is implemented on the torus")
    if lat.n_vertices > rbim.ENUM_MAX_VERTICES and min(lat.Lx, lat.Ly) > rbim.TRANSFER_MAX_WIDTH:
        raise ValueError("lattice too large for exact ml decoding")
    if p == 0:
        return (1, 1)
    if p == 1:
        return lt.homology_class(lat, np.ones(lat.n_edges, dtype=bool))
    return lt.CLASSES[_ml_cached(lat.Lx, lat.Ly, float(p), syndrome_mask(syn))]


def ml_decode_result(lat, syndrome, p: float) -> DecodeResult:
    syn = _check_syndrome(lat, syndrome)
    if p in (0, 1) and syn.any():
        raise ValueError("syndrome impossible at p in {0, 1}")
    q = ml_decode(lat, syn, p)
    return DecodeResult(lt.reference_string(lat, syn, q), q, "ml")


def decode(lat, syndrome, decoder: str = "mwpm", p: Optional[float] = None) -> DecodeResult:
    if decoder == "mwpm":
        return mwpm_decode(lat, syndrome)
    if decoder == "local":
        return local_decode(lat, syndrome)[1]
    if decoder == "ml":
        if p is None:
            raise ValueError("ml decoding needs the error rate p")
        return ml_decode_result(lat, syndrome, p)
    raise ValueError(f"unknown decoder {decoder!r}; choose from {DECODERS}")


def evaluate_decode(sample: ErrorSample, result: DecodeResult, lat) -> Tuple[int, int]:
    """(w_x, w_y) of errors + recovery; (1, 1) means the class was recovered."""
    if np.any(lt.syndrome(lat, result.recovery) != sample.syndrome):
        raise ValueError("recovery does not annihilate the syndrome")
    return lt.homology_class(lat, sample.errors ^ result.recovery)


def write_decode_records(fh, indices, defects, cost, w_x, w_y):
    fh.write("sample_index,defects,cost,w_x,w_y\n")
    for row in zip(indices, defects, cost, w_x, w_y):
        fh.write(",".join(str(int(v)) for v in row) + "\n")
