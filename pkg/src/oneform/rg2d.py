"""Classical coarse-graining of closed-loop bit configurations on a 2^N x 2^N torus.

Bits are stored as an array of shape (..., n, n, 2) indexed [y, x, dir], which
flattens to the lattice edge order. One step halves the linear size:

  pass          target (coarse)        control (fine)     fine bits dropped
  horizontal    E'(X, y) = e(2X, y)     e(2X+1, y)         n(2X+1, y)
  vertical      N(X, Y)  = n(2X, 2Y)    n(2X, 2Y+1)        E'(X, 2Y+1)

Each CNOT XORs the control into the target; the kept bits are E(X, Y) =
E'(X, 2Y) and N(X, Y). Afterwards the two bits e(2X, 2Y) and n(2X, 2Y), which
the passes never modify, control a vertex-star flip of the four coarse edges at
coarse vertex (X, Y). A dual loop seen as a domain wall of vertex spins flips
the coarse spin whenever both fine spins east and north of the vertex disagree with it.
"""
from dataclasses import dataclass

import numpy as np

from . import lattice as lt

STENCIL = (
    # (pass, target offset, control offset, direction)
    ("horizontal", (0, 0), (1, 0), lt.EAST),
    ("vertical", (0, 0), (0, 1), lt.NORTH),
)


@dataclass
class BitGrid:
    bits: np.ndarray
    rounds: int = 0

    @property
    def size(self) -> int:
        return self.bits.shape[-2]


def grid_from_chain(lat: lt.TorusLattice, chain) -> BitGrid:
    if not lat.periodic_x or lat.Lx != lat.Ly:
        raise ValueError("needs a square torus")
    return BitGrid(np.asarray(chain, dtype=bool).reshape(lat.Ly, lat.Lx, 2).copy())


def plaquette_parity(bits: np.ndarray) -> np.ndarray:
    """Parity around each plaquette, shape (..., n, n); all False for closed loops."""
    e = bits[..., lt.EAST]
    n = bits[..., lt.NORTH]
    return e ^ np.roll(e, -1, axis=-2) ^ n ^ np.roll(n, -1, axis=-1)


def _check(bits):
    n = bits.shape[-2]
    if bits.shape[-3] != n or bits.shape[-1] != 2:
        raise ValueError("bits must have shape (..., n, n, 2)")
    if n < 4 or n % 2:
        raise ValueError(f"linear size {n} must be even and at least 4")
    if plaquette_parity(bits).any():
        raise ValueError("grid violates the closed-loop constraint")


def rg_step_array(bits: np.ndarray, check: bool = True) -> np.ndarray:
    """One coarse-graining step on a stack of grids."""
    bits = np.asarray(bits, dtype=bool)
    if check:
        _check(bits)
    e = bits[..., lt.EAST]
    n = bits[..., lt.NORTH]
    (_, (tx, _), (cx, _), _), (_, (_, ty), (_, cy), _) = STENCIL
    e_h = e[..., :, tx::2] ^ e[..., :, cx::2]
    n_h = n[..., :, 0::2]
    n_c = n_h[..., ty::2, :] ^ n_h[..., cy::2, :]
    e_c = e_h[..., 0::2, :]
    flip = e[..., 0::2, 0::2] & n[..., 0::2, 0::2]
    # Star of coarse vertex (X, Y): E(X, Y), E(X-1, Y), N(X, Y), N(X, Y-1).
    e_c = e_c ^ flip ^ np.roll(flip, -1, axis=-1)
    n_c = n_c ^ flip ^ np.roll(flip, -1, axis=-2)
    return np.stack([e_c, n_c], axis=-1)


def coarse_grain_only(bits: np.ndarray) -> np.ndarray:
    """The two CNOT passes without the vertex-star step."""
    e = bits[..., lt.EAST]
    n = bits[..., lt.NORTH]
    e_h = e[..., :, 0::2] ^ e[..., :, 1::2]
    n_h = n[..., :, 0::2]
    return np.stack([e_h[..., 0::2, :], n_h[..., 0::2, :] ^ n_h[..., 1::2, :]], axis=-1)


def rg_step(grid: BitGrid) -> BitGrid:
    return BitGrid(rg_step_array(grid.bits), grid.rounds + 1)


def max_rounds(size: int) -> int:
    return int(np.log2(size)) - 1


def probe_values(bits: np.ndarray, n_rg_max: int) -> np.ndarray:
    """(-1)^(probe bit) after 0..n_rg_max steps, shape (n_samples, n_rg_max + 1).

    The probe is the first edge of the residual grid (east edge at the origin).
    """
    bits = np.asarray(bits, dtype=bool)
    _check(bits)
    if n_rg_max > max_rounds(bits.shape[-2]):
        raise ValueError("too many rounds for this grid size")
    out = [bits[..., 0, 0, lt.EAST]]
    for _ in range(n_rg_max):
        bits = rg_step_array(bits, check=False)
        out.append(bits[..., 0, 0, lt.EAST])
    return 1 - 2 * np.stack(out, axis=-1).astype(np.int64)


def disorder_parameter(samples, n_rg: int):
    """Mean and standard error of (-1)^(probe bit) after n_rg steps."""
    if isinstance(samples, BitGrid):
        samples = [samples]
    bits = np.stack([s.bits if isinstance(s, BitGrid) else s for s in samples])
    vals = probe_values(bits, n_rg)[:, n_rg]
    mean = float(vals.mean())
    err = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
    return mean, err
