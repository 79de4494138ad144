"""Folded-subsystem indicator on a cylinder.

The full system is a cylinder (open in x, periodic in y). Subsystem A is a
rectangular plaquette window. The protocol decodes the full system, drops the
A-charges whose recovery string leaves A, folds A onto a torus by gluing its
opposite sides, re-decodes there and scores the parity of seam crossings of
the new recovery relative to the original in-A recovery. Only the glued sides
that are A|B interfaces count as seams; sides lying on a rough boundary or
spanning the periodic direction are glued without being scored.
"""
from dataclasses import dataclass

import numpy as np

from . import lattice as lt
from .decode import DecodeResult, mwpm_pairs, pairs_class_flips
from .rng import mean_stderr


@dataclass(frozen=True)
class RegionSpec:
    full: lt.TorusLattice
    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        f = self.full
        if f.periodic_x:
            raise ValueError("the full system must be a cylinder")
        spans = self.x0 == 0 and self.width == f.Lx
        inside = 0 < self.x0 and self.x0 + self.width < f.Lx
        if not (spans or inside):
            raise ValueError("A must span the open direction or sit strictly inside it")
        if not (1 <= self.height <= f.Ly and 0 <= self.y0 < f.Ly):
            raise ValueError("A height out of range")
        if self.width < 2 or self.height < 2 or self.width % 2 or self.height % 2:
            raise ValueError("A needs even sides of at least 2")
        if not (self.seam_x or self.seam_y):
            raise ValueError("A has no boundary with B")

    @property
    def seam_x(self) -> bool:
        """Left and right sides of A border B."""
        return self.width < self.full.Lx

    @property
    def seam_y(self) -> bool:
        """Top and bottom sides of A border B."""
        return self.height < self.full.Ly

    def contains(self, p) -> np.ndarray:
        x, y = self.full.plaquette_coords(p)
        dy = (y - self.y0) % self.full.Ly
        return (x >= self.x0) & (x < self.x0 + self.width) & (dy < self.height)

    def folded(self) -> lt.TorusLattice:
        return lt.build_torus(self.width, self.height)

    def fold(self, p) -> np.ndarray:
        """Folded-torus plaquette index of full-system plaquettes inside A."""
        x, y = self.full.plaquette_coords(p)
        return ((y - self.y0) % self.full.Ly) * self.width + (x - self.x0)

    def interface_lines(self):
        """One A|B interface line per scored direction, as edge masks of the full lattice."""
        f = self.full
        lx = np.zeros(f.n_edges, dtype=bool)
        ly = np.zeros(f.n_edges, dtype=bool)
        if self.seam_x:
            for r in range(self.height):
                lx[f.edge(self.x0, self.y0 + r, lt.NORTH)] = True
        if self.seam_y:
            for c in range(self.width):
                ly[f.edge(self.x0 + c, self.y0, lt.EAST)] = True
        return lx, ly


def centered_region(N: int) -> RegionSpec:
    """N x N subsystem on an N (open) by 2N (periodic) cylinder, spanning the open direction."""
    return RegionSpec(lt.build_cylinder(N, 2 * N), 0, N // 2, N, N)


@dataclass
class SplitResult:
    S_A: np.ndarray
    S_AB: np.ndarray
    S_B: np.ndarray
    removed: np.ndarray
    residual: np.ndarray


def split_strings(result: DecodeResult, region: RegionSpec) -> SplitResult:
    """Sort matched pairs by endpoint membership.

    A-charges on strings into B, or onto a rough boundary, are removed. The
    residual syndrome lives on the folded torus.
    """
    pairs = np.asarray(result.pairs, dtype=np.int64).reshape(-1, 2)
    bnd = np.asarray(result.to_boundary if result.to_boundary is not None else [], dtype=np.int64)
    ina = region.contains(pairs) if pairs.size else np.zeros((0, 2), dtype=bool)
    both = ina.all(axis=1)
    neither = ~ina.any(axis=1)
    cross = ~both & ~neither
    removed = np.concatenate([pairs[cross][ina[cross]], bnd[region.contains(bnd)]]).astype(np.int64)
    residual = np.zeros(region.width * region.height, dtype=bool)
    residual[region.fold(pairs[both].ravel())] = True
    return SplitResult(pairs[both], pairs[cross], pairs[neither], np.sort(removed), residual)


def _in_a_parities(region, S_A):
    """Parities of the original in-A strings across one interface line per direction.

    Staircase x-moves on the cylinder never wrap, so only the y-interface can be
    crossed; that count is the y-wrap in a frame whose row 0 is the first row of A.
    """
    if not S_A.size or not region.seam_y:
        return 0, 0
    f = region.full
    x, y = f.plaquette_coords(S_A)
    shifted = ((y - region.y0) % f.Ly) * f.Lx + x
    _, wy = lt.staircase_wraps(f, shifted[:, 0], shifted[:, 1])
    return 0, int(np.count_nonzero(wy) % 2)


def folded_score(region: RegionSpec, syndrome, decoder: str = "mwpm") -> int:
    """+1 or -1 for one full-system syndrome."""
    if decoder != "mwpm":
        raise ValueError("the folded indicator uses the mwpm decoder")
    full = region.full
    pairs, bnd = mwpm_pairs(full, syndrome)
    split = split_strings(DecodeResult(None, None, "mwpm", None, pairs, bnd), region)
    ox, oy = _in_a_parities(region, split.S_A)
    torus = region.folded()
    new_pairs, _ = mwpm_pairs(torus, split.residual)
    # C_x of the folded torus is the glued top/bottom side, C_y the glued left/right side.
    y_wrap, x_wrap = pairs_class_flips(torus, new_pairs)
    parity = 0
    if region.seam_y:
        parity += y_wrap + oy
    if region.seam_x:
        parity += x_wrap + ox
    return -1 if parity % 2 else 1


def folded_scores(region: RegionSpec, errors: np.ndarray, decoder: str = "mwpm") -> np.ndarray:
    syn = lt.syndrome(region.full, np.asarray(errors, dtype=bool))
    return np.array([folded_score(region, s, decoder) for s in syn], dtype=np.int64)


def folded_indicator(samples, region: RegionSpec, decoder: str = "mwpm"):
    """Mean score and its standard error over error samples of the full system."""
    if hasattr(samples[0], "errors"):
        samples = np.stack([s.errors for s in samples])
    return mean_stderr(folded_scores(region, samples, decoder))
