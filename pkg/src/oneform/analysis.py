"""Finite-size crossings and data collapse for indicator curves."""
import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional

import numpy as np

N_BOOTSTRAP = 200


@dataclass
class Curve:
    x: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    L: int
    n_samples: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if not (self.x.shape == self.mean.shape == self.stderr.shape):
            raise ValueError("x, mean and stderr must have the same length")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(self.stderr < 0):
            raise ValueError("stderr must be non-negative")


@dataclass
class CrossingResult:
    found: bool
    x_c: float
    spread: float = float("nan")
    bootstrap_err: float = float("nan")
    pair_crossings: List[float] = field(default_factory=list)

    @property
    def err(self) -> float:
        """Half-spread of the pairwise crossings and bootstrap error, in quadrature."""
        if not self.found:
            return float("nan")
        b = 0.0 if math.isnan(self.bootstrap_err) else self.bootstrap_err
        return math.hypot(self.spread, b)


def pair_crossing(xa, ya, xb, yb) -> Optional[float]:
    """Crossing of two piecewise-linear curves on their common grid points.

    Uses grid points shared by both curves inside the overlap. With several
    sign changes the one where the difference has the steepest slope wins, so
    noise in a tail where both curves sit on top of each other is ignored.
    """
    common, ia, ib = np.intersect1d(xa, xb, return_indices=True)
    if common.size < 2:
        # Fall back to interpolating b onto a's grid inside the overlap.
        lo, hi = max(xa[0], xb[0]), min(xa[-1], xb[-1])
        sel = (xa >= lo) & (xa <= hi)
        common = xa[sel]
        d = ya[sel] - np.interp(common, xb, yb)
    else:
        d = ya[ia] - yb[ib]
    if common.size < 2:
        return None
    hits = []
    for i in range(common.size - 1):
        d0, d1 = d[i], d[i + 1]
        slope = abs(d1 - d0) / (common[i + 1] - common[i])
        if d0 == 0:
            hits.append((slope, common[i]))
        elif d0 * d1 < 0:
            hits.append((slope, common[i] + (common[i + 1] - common[i]) * d0 / (d0 - d1)))
    if d[-1] == 0:
        hits.append((abs(d[-1] - d[-2]) / (common[-1] - common[-2]), common[-1]))
    if not hits:
        return None
    return float(max(hits, key=lambda h: h[0])[1])


def _estimate(curves, means):
    xs = []
    for (i, a), (j, b) in combinations(enumerate(curves), 2):
        c = pair_crossing(a.x, means[i], b.x, means[j])
        if c is not None:
            xs.append(c)
    return xs


def crossing_estimate(curves: List[Curve], seed: int = 0, n_boot: int = N_BOOTSTRAP) -> CrossingResult:
    """Median of pairwise crossings, half-spread, and a bootstrap error."""
    if len(curves) < 2:
        raise ValueError("need at least two curves")
    xs = _estimate(curves, [c.mean for c in curves])
    if not xs:
        return CrossingResult(False, float("nan"))
    x_c = float(np.median(xs))
    spread = 0.5 * (max(xs) - min(xs))
    rng = np.random.default_rng(seed)
    boot = []
    for _ in range(n_boot):
        means = [c.mean + c.stderr * rng.standard_normal(c.mean.size) for c in curves]
        bx = _estimate(curves, means)
        if bx:
            boot.append(np.median(bx))
    berr = float(np.std(boot)) if len(boot) > 1 else float("nan")
    return CrossingResult(True, x_c, spread, berr, xs)


@dataclass
class CollapseResult:
    points: List[np.ndarray]
    quality: float


def data_collapse(curves: List[Curve], x_c: float, nu: float) -> CollapseResult:
    """Rescale x to (x - x_c) L^(1/nu); quality = mean variance across sizes on the common support."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    us = [(c.x - x_c) * c.L ** (1.0 / nu) for c in curves]
    lo = max(u[0] for u in us)
    hi = min(u[-1] for u in us)
    if hi <= lo:
        raise ValueError("rescaled curves do not overlap")
    grid = np.unique(np.concatenate([u[(u >= lo) & (u <= hi)] for u in us]))
    if grid.size < 2:
        raise ValueError("too few points on the common support")
    ys = np.array([np.interp(grid, u, c.mean) for u, c in zip(us, curves)])
    quality = float(np.mean(np.var(ys, axis=0)))
    points = [np.column_stack([u, c.mean]) for u, c in zip(us, curves)]
    return CollapseResult(points, quality)


def collapse_scan(curves, xc_grid, nu_grid):
    """Grid search for the best collapse; returns (x_c, nu, quality)."""
    best = (float("nan"), float("nan"), float("inf"))
    for xc in xc_grid:
        for nu in nu_grid:
            try:
                q = data_collapse(curves, xc, nu).quality
            except ValueError:
                continue
            if q < best[2]:
                best = (float(xc), float(nu), q)
    return best


def _numeric_lines(text):
    return "\n".join(line for line in text.splitlines() if line and not line.startswith("#"))


def curves_from_csv(text: str, x_col: Optional[str] = None) -> List[Curve]:
    """Read curves (one per L) from a result CSV.

    For RG output only the rows at the largest n_rg of each size are used.
    """
    rows = list(csv.DictReader(io.StringIO(_numeric_lines(text))))
    if not rows:
        raise ValueError("no data rows")
    cols = rows[0].keys()
    if x_col is None:
        for cand in ("p", "theta_or_params", "p_or_theta", "params", "x"):
            if cand in cols:
                x_col = cand
                break
    size_col = "A_size" if "A_size" in cols else "L"
    if x_col not in cols or size_col not in cols or "mean" not in cols:
        raise ValueError("CSV lacks x, size or mean columns")
    if "n_rg" in cols:
        top = {}
        for r in rows:
            top[r[size_col]] = max(top.get(r[size_col], -1), int(r["n_rg"]))
        rows = [r for r in rows if int(r["n_rg"]) == top[r[size_col]]]
    by_size = {}
    for r in rows:
        by_size.setdefault(int(r[size_col]), []).append(r)
    curves = []
    for L in sorted(by_size):
        rs = sorted(by_size[L], key=lambda r: float(r[x_col]))
        curves.append(Curve([float(r[x_col]) for r in rs], [float(r["mean"]) for r in rs],
                            [float(r["stderr"]) for r in rs], L,
                            int(rs[0].get("n_samples", 0) or 0)))
    return curves
