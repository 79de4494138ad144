"""Square-lattice geometry on the torus and on the cylinder.

Edges carry qubits. Edge index = 2 * (vy * Lx + vx) + dir with dir 0 = east
(vertex (vx, vy) to (vx + 1, vy)) and dir 1 = north ((vx, vy) to (vx, vy + 1)).
Plaquette (x, y) has lower-left vertex (x, y) and index y * Lx + x.

The cylinder variant is open in x and periodic in y. It has one extra column
of vertices at vx = Lx whose north edges get the indices 2 * Lx * Ly + vy.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

EAST = 0
NORTH = 1


@dataclass(frozen=True)
class CycleReps:
    """Fixed non-contractible loop representatives (boolean edge masks)."""
    C_x: Optional[np.ndarray]
    C_y: np.ndarray
    Cdual_x: np.ndarray
    Cdual_y: Optional[np.ndarray]


class TorusLattice:
    """Indexed square lattice; `boundary` is "torus" or "cylinder".

    All index arrays are built once and marked read-only.
    """

    def __init__(self, Lx: int, Ly: int, boundary: str = "torus"):
        if int(Lx) != Lx or int(Ly) != Ly:
            raise ValueError("lattice sizes must be integers")
        Lx, Ly = int(Lx), int(Ly)
        if Lx < 2 or Ly < 2:
            raise ValueError(f"lattice sizes must be >= 2, got {Lx}x{Ly}")
        if boundary not in ("torus", "cylinder"):
            raise ValueError(f"unknown boundary kind {boundary!r}")
        self.Lx = Lx
        self.Ly = Ly
        self.boundary = boundary
        self.n_plaquettes = Lx * Ly
        if boundary == "torus":
            self.n_edges = 2 * Lx * Ly
            self.n_vertices = Lx * Ly
        else:
            self.n_edges = 2 * Lx * Ly + Ly
            self.n_vertices = (Lx + 1) * Ly
        self._build()

    @property
    def periodic_x(self) -> bool:
        return self.boundary == "torus"

    def edge(self, vx: int, vy: int, d: int) -> int:
        """Index of the edge leaving vertex (vx, vy) in direction d."""
        vy %= self.Ly
        if self.periodic_x:
            vx %= self.Lx
        elif vx == self.Lx:
            if d != NORTH:
                raise IndexError("no east edge on the right boundary column")
            return 2 * self.Lx * self.Ly + vy
        elif not 0 <= vx < self.Lx:
            raise IndexError(f"vertex column {vx} outside the cylinder")
        return 2 * (vy * self.Lx + vx) + d

    def vertex(self, vx: int, vy: int) -> int:
        vy %= self.Ly
        if self.periodic_x:
            return vy * self.Lx + vx % self.Lx
        if vx == self.Lx:
            return self.Lx * self.Ly + vy
        return vy * self.Lx + vx

    def plaquette(self, x: int, y: int) -> int:
        if self.periodic_x:
            x %= self.Lx
        return (y % self.Ly) * self.Lx + x

    def plaquette_coords(self, p):
        p = np.asarray(p)
        return p % self.Lx, p // self.Lx

    def _build(self):
        Lx, Ly = self.Lx, self.Ly
        pe = np.empty((self.n_plaquettes, 4), dtype=np.int64)
        for y in range(Ly):
            for x in range(Lx):
                pe[self.plaquette(x, y)] = (
                    self.edge(x, y, EAST), self.edge(x, y + 1, EAST),
                    self.edge(x, y, NORTH), self.edge(x + 1, y, NORTH))
        ep = np.full((self.n_edges, 2), -1, dtype=np.int64)
        fill = np.zeros(self.n_edges, dtype=np.int64)
        for p in range(self.n_plaquettes):
            for e in pe[p]:
                ep[e, fill[e]] = p
                fill[e] += 1

        ev = np.empty((self.n_edges, 2), dtype=np.int64)
        ve = np.full((self.n_vertices, 4), -1, dtype=np.int64)
        vfill = np.zeros(self.n_vertices, dtype=np.int64)
        ncols = Lx if self.periodic_x else Lx + 1
        for vy in range(Ly):
            for vx in range(ncols):
                v = self.vertex(vx, vy)
                for d, (dx, dy) in ((EAST, (1, 0)), (NORTH, (0, 1))):
                    if d == EAST and not self.periodic_x and vx == Lx:
                        continue
                    e = self.edge(vx, vy, d)
                    w = self.vertex(vx + dx, vy + dy)
                    ev[e] = (v, w)
                    for u in (v, w):
                        ve[u, vfill[u]] = e
                        vfill[u] += 1

        self.plaquette_edges = pe
        self.edge_plaquettes = ep
        self.edge_vertices = ev
        self.vertex_edges = ve
        for arr in (pe, ep, ev, ve):
            arr.setflags(write=False)

        east_row0 = np.zeros(self.n_edges, dtype=bool)
        east_col0 = np.zeros(self.n_edges, dtype=bool)
        north_row0 = np.zeros(self.n_edges, dtype=bool)
        north_col0 = np.zeros(self.n_edges, dtype=bool)
        for x in range(Lx):
            east_row0[self.edge(x, 0, EAST)] = True
        for y in range(Ly):
            east_col0[self.edge(0, y, EAST)] = True
            north_col0[self.edge(0, y, NORTH)] = True
        for x in range(ncols):
            north_row0[self.edge(x, 0, NORTH)] = True
        for arr in (east_row0, east_col0, north_row0, north_col0):
            arr.setflags(write=False)
        if self.periodic_x:
            self.cycles = CycleReps(east_row0, north_col0, east_col0, north_row0)
        else:
            # Only the loop around the periodic direction is closed; the
            # dual path across the cylinder runs boundary to boundary.
            self.cycles = CycleReps(None, north_col0, east_col0, north_row0)

    def header(self) -> str:
        return f"Lx={self.Lx} Ly={self.Ly} boundary={self.boundary}"

    def __repr__(self):
        return f"TorusLattice({self.Lx}, {self.Ly}, boundary={self.boundary!r})"


@lru_cache(maxsize=64)
def build_torus(Lx: int, Ly: int) -> TorusLattice:
    return TorusLattice(Lx, Ly, "torus")


@lru_cache(maxsize=64)
def build_cylinder(Lx: int, Ly: int) -> TorusLattice:
    """Lattice open in x (rough boundaries at vx = 0 and vx = Lx), periodic in y."""
    return TorusLattice(Lx, Ly, "cylinder")


def empty_edges(lat: TorusLattice) -> np.ndarray:
    return np.zeros(lat.n_edges, dtype=bool)


def edge_set(lat: TorusLattice, indices) -> np.ndarray:
    """Boolean edge mask from a list of indices (repeated indices cancel)."""
    counts = np.bincount(np.asarray(indices, dtype=np.int64), minlength=lat.n_edges)
    return (counts % 2).astype(bool)


def _check_chain(lat, chain):
    chain = np.asarray(chain, dtype=bool)
    if chain.shape[-1] != lat.n_edges:
        raise ValueError(f"edge set has length {chain.shape[-1]}, lattice has {lat.n_edges} edges")
    return chain


def plaquette_boundary(lat: TorusLattice, p: int) -> np.ndarray:
    if not 0 <= p < lat.n_plaquettes:
        raise IndexError(f"plaquette index {p} out of range")
    out = empty_edges(lat)
    out[lat.plaquette_edges[p]] = True
    return out


def vertex_star(lat: TorusLattice, v: int) -> np.ndarray:
    if not 0 <= v < lat.n_vertices:
        raise IndexError(f"vertex index {v} out of range")
    out = empty_edges(lat)
    star = lat.vertex_edges[v]
    out[star[star >= 0]] = True
    return out


def syndrome(lat: TorusLattice, chain) -> np.ndarray:
    """Plaquette parities of an X chain; True marks a defect (m_p = -1).

    Works on a single mask or on a stack of masks along the first axis.
    """
    chain = _check_chain(lat, chain)
    return np.bitwise_xor.reduce(chain[..., lat.plaquette_edges], axis=-1)


def vertex_parity(lat: TorusLattice, chain) -> np.ndarray:
    """Vertex-star parities; all False for a closed primal loop."""
    chain = _check_chain(lat, chain)
    ve = lat.vertex_edges
    padded = np.concatenate([chain, np.zeros(chain.shape[:-1] + (1,), dtype=bool)], axis=-1)
    return np.bitwise_xor.reduce(padded[..., ve], axis=-1)


def crossing_parity(lat: TorusLattice, chain, loop) -> int:
    """(-1)^|chain & loop|."""
    chain = _check_chain(lat, chain)
    loop = _check_chain(lat, loop)
    return -1 if np.count_nonzero(chain & loop) % 2 else 1


def homology_class(lat: TorusLattice, chain) -> Tuple[int, int]:
    """Eigenvalues (q_x, q_y) of the two reference Z loops on X_chain|0...0>."""
    if lat.cycles.C_x is None:
        raise ValueError("homology class needs a torus")
    return (crossing_parity(lat, chain, lat.cycles.C_x),
            crossing_parity(lat, chain, lat.cycles.C_y))


def torus_distance(lat: TorusLattice, a, b) -> np.ndarray:
    """Manhattan distance between plaquettes with wraparound."""
    ax, ay = lat.plaquette_coords(a)
    bx, by = lat.plaquette_coords(b)
    dx = np.abs(ax - bx)
    dy = np.abs(ay - by)
    if lat.periodic_x:
        dx = np.minimum(dx, lat.Lx - dx)
    dy = np.minimum(dy, lat.Ly - dy)
    return dx + dy


def _steps(delta, size, periodic):
    """Signed direction and step count of the shortest move; ties go +."""
    if periodic:
        d = np.mod(delta, size)
        forward = d <= size - d
        return np.where(forward, 1, -1), np.where(forward, d, size - d)
    return np.where(delta >= 0, 1, -1), np.abs(delta)


def _ranges(counts):
    """For group sizes n_i, return (group id, position in group) per element."""
    counts = np.asarray(counts, dtype=np.int64)
    group = np.repeat(np.arange(counts.size), counts)
    starts = np.cumsum(counts) - counts
    return group, np.arange(counts.sum()) - starts[group]


def staircase_edges(lat: TorusLattice, a, b) -> np.ndarray:
    """Edges crossed by dual staircase paths from plaquettes a to plaquettes b.

    Each path runs along row ay in x first and then along column bx in y,
    taking the shorter way around and breaking ties toward +. The returned
    index array may repeat edges; XOR them to get the chain.
    """
    a = np.atleast_1d(np.asarray(a, dtype=np.int64))
    b = np.atleast_1d(np.asarray(b, dtype=np.int64))
    ax, ay = lat.plaquette_coords(a)
    bx, by = lat.plaquette_coords(b)
    sx, nx = _steps(bx - ax, lat.Lx, lat.periodic_x)
    sy, ny = _steps(by - ay, lat.Ly, True)

    g, k = _ranges(nx)
    cols = ax[g] + (sx[g] == 1) + sx[g] * k
    rows = ay[g]
    if lat.periodic_x:
        cols = cols % lat.Lx
        x_edges = 2 * (rows * lat.Lx + cols) + NORTH
    else:
        x_edges = np.where(cols == lat.Lx, 2 * lat.Lx * lat.Ly + rows,
                           2 * (rows * lat.Lx + np.minimum(cols, lat.Lx - 1)) + NORTH)

    g, k = _ranges(ny)
    rows = (ay[g] + (sy[g] == 1) + sy[g] * k) % lat.Ly
    y_edges = 2 * (rows * lat.Lx + bx[g]) + EAST
    return np.concatenate([x_edges, y_edges])


def boundary_edges(lat: TorusLattice, a) -> np.ndarray:
    """Edges crossed by straight paths from plaquettes a to the nearer rough boundary.

    Cylinder only. Ties go to the left boundary.
    """
    if lat.periodic_x:
        raise ValueError("boundary paths need the cylinder variant")
    a = np.atleast_1d(np.asarray(a, dtype=np.int64))
    x, y = lat.plaquette_coords(a)
    left = x + 1 <= lat.Lx - x
    n = np.where(left, x + 1, lat.Lx - x)
    g, k = _ranges(n)
    cols = np.where(left[g], x[g] - k, x[g] + 1 + k)
    rows = y[g]
    return np.where(cols == lat.Lx, 2 * lat.Lx * lat.Ly + rows,
                    2 * (rows * lat.Lx + np.minimum(cols, lat.Lx - 1)) + NORTH)


def boundary_distance(lat: TorusLattice, a) -> np.ndarray:
    x, _ = lat.plaquette_coords(a)
    return np.minimum(x + 1, lat.Lx - x)


def staircase_wraps(lat: TorusLattice, a, b):
    """Whether each staircase path crosses C_y (x wrap) and C_x (y wrap)."""
    a = np.atleast_1d(np.asarray(a, dtype=np.int64))
    b = np.atleast_1d(np.asarray(b, dtype=np.int64))
    ax, ay = lat.plaquette_coords(a)
    bx, by = lat.plaquette_coords(b)
    sx, nx = _steps(bx - ax, lat.Lx, lat.periodic_x)
    sy, ny = _steps(by - ay, lat.Ly, True)
    if lat.periodic_x:
        wx = np.where(sx == 1, ax + nx >= lat.Lx, ax < nx)
    else:
        wx = np.zeros(a.shape, dtype=bool)
    wy = np.where(sy == 1, ay + ny >= lat.Ly, ay < ny)
    return wx, wy


def pairs_chain(lat: TorusLattice, pairs, to_boundary=()) -> np.ndarray:
    """Chain of staircase paths for matched pairs plus boundary paths."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    idx = [staircase_edges(lat, pairs[:, 0], pairs[:, 1])]
    if len(to_boundary):
        idx.append(boundary_edges(lat, to_boundary))
    return edge_set(lat, np.concatenate(idx))


CLASSES = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def class_index(q) -> int:
    """Position of (q_x, q_y) in CLASSES."""
    return 2 * (q[0] == -1) + (q[1] == -1)


def reference_string(lat: TorusLattice, defects, q=(1, 1)) -> np.ndarray:
    """A fixed X chain with the given defects and homology class q.

    Defects are paired in index order with staircase paths; the dual loops
    Cdual_x and Cdual_y are then toggled to reach the requested class.
    """
    defects = np.flatnonzero(defects) if np.asarray(defects).dtype == bool else np.asarray(defects)
    if defects.size % 2:
        raise ValueError("odd number of defects on a torus")
    chain = pairs_chain(lat, defects.reshape(-1, 2))
    qx, qy = homology_class(lat, chain)
    if qx != q[0]:
        chain ^= lat.cycles.Cdual_x
    if qy != q[1]:
        chain ^= lat.cycles.Cdual_y
    return chain
