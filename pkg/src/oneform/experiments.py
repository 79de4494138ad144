"""Experiment pipelines behind the command line.

Each pipeline returns (columns, rows, summary). Sampling runs through
rng.map_samples with a stream tag (experiment id, size, grid index), so every
row is reproducible on its own and independent of the worker count.

Theta grids are given in units of pi.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from . import chain1d, lattice as lt, rbim
from .analysis import Curve, collapse_scan, crossing_estimate, curves_from_csv, data_collapse
from .decode import DECODERS, evaluate_decode, local_densities, ml_decode_result, mwpm_batch, mwpm_pairs
from .planar import centered_region, folded_scores
from .qstate import error_batch, kappa_exact, make_sample, product_state, sum_max_kappa
from .rg2d import max_rounds, probe_values
from .rng import map_samples, mean_stderr

STREAM = {"wz-scan": 1, "rg-disorder": 2, "planar-scan": 3, "chain-ising": 4, "chain-spt": 5, "local-scan": 6}


@dataclass
class ExperimentConfig:
    experiment: str
    sizes: List[Tuple[int, int]]
    grid: Optional[np.ndarray]
    decoder: str
    n_samples: int
    seed: int
    out: str
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {
            "experiment": self.experiment,
            "L": ["%dx%d" % s for s in self.sizes],
            "grid": None if self.grid is None else [float(g) for g in self.grid],
            "decoder": self.decoder,
            "samples": self.n_samples,
            "seed": self.seed,
            "extra": self.extra,
        }


def product_p(theta_over_pi: float) -> float:
    """Flip probability of the product state at angle theta = pi * theta_over_pi."""
    return math.sin(0.5 * math.pi * theta_over_pi) ** 2


def _curve_summary(curves):
    if len(curves) < 2:
        return {"crossing": None}
    res = crossing_estimate(curves)
    return {"crossing": {"found": res.found, "x_c": res.x_c if res.found else None,
                         "err": res.err if res.found else None,
                         "pair_crossings": res.pair_crossings}}


def _square(sizes, name):
    for lx, ly in sizes:
        if lx != ly:
            raise ValueError(f"{name} needs square sizes, got {lx}x{ly}")
    return [s[0] for s in sizes]


# chunk workers (module level so they pickle)

def _wz_chunk(Lx, Ly, p, seed, stream, decoder, start, count):
    lat = lt.build_torus(Lx, Ly)
    errors = error_batch(lat, p, seed, start, count, stream)
    if decoder == "mwpm":
        _, _, w_x, w_y = mwpm_batch(lat, errors)
    else:
        w = np.array([evaluate_decode(s, ml_decode_result(lat, s.syndrome, p), lat)
                      for s in (make_sample(lat, e) for e in errors)])
        w_x, w_y = w[:, 0], w[:, 1]
    return 0.5 * (w_x + w_y)


def _local_chunk(L, p, seed, stream, start, count):
    lat = lt.build_torus(L, L)
    return local_densities(lat, error_batch(lat, p, seed, start, count, stream))


def _rg_chunk(L, p, seed, stream, n_rg, start, count):
    lat = lt.build_torus(L, L)
    errors = error_batch(lat, p, seed, start, count, stream)
    syn = lt.syndrome(lat, errors)
    corrected = errors.copy()
    for i in range(count):
        if syn[i].any():
            pairs, _ = mwpm_pairs(lat, syn[i])
            corrected[i] ^= lt.pairs_chain(lat, pairs)
    return probe_values(corrected.reshape(count, L, L, 2), n_rg)


def _planar_chunk(N, p, seed, stream, start, count):
    region = centered_region(N)
    return folded_scores(region, error_batch(region.full, p, seed, start, count, stream))


@lru_cache(maxsize=64)
def _ising_state(L, h_x, h_z):
    return chain1d.ising_ground_state(L, h_x, h_z)


@lru_cache(maxsize=64)
def _cluster_state(L, delta):
    return chain1d.cluster_ground_state(L, delta)


def _ising_chunk(L, h_x, h_z, seed, stream, start, count):
    idx = chain1d.sample_bitstrings(_ising_state(L, h_x, h_z), count, seed, start, stream)
    return chain1d.majority_values(idx, L)


def _spt_chunk(L, L_sub, delta, seed, stream, start, count):
    idx = chain1d.sample_bitstrings(_cluster_state(L, delta), count, seed, start, stream)
    return chain1d.spt_agreements(idx, L, L_sub)


# pipelines

def run_wz_scan(cfg):
    if cfg.decoder not in ("mwpm", "ml"):
        raise ValueError("wz-scan supports the mwpm and ml decoders")
    rows, curves = [], []
    for lx, ly in cfg.sizes:
        means, errs = [], []
        for k, p in enumerate(cfg.grid):
            stream = (STREAM["wz-scan"], lx, ly, k)
            vals = map_samples(_wz_chunk, cfg.n_samples, (lx, ly, float(p), cfg.seed, stream, cfg.decoder),
                               cfg.workers)
            m, e = mean_stderr(vals)
            means.append(m)
            errs.append(e)
            rows.append([lx, ly, p, m, e, cfg.n_samples])
        curves.append(Curve(cfg.grid, means, errs, lx, cfg.n_samples))
    return ["Lx", "Ly", "p", "mean", "stderr", "n_samples"], rows, _curve_summary(curves)


def run_local_scan(cfg):
    rows, per_round = [], {}
    for L in _square(cfg.sizes, "local-scan"):
        for k, p in enumerate(cfg.grid):
            stream = (STREAM["local-scan"], L, k)
            dens = map_samples(_local_chunk, cfg.n_samples, (L, float(p), cfg.seed, stream), cfg.workers)
            for r in range(dens.shape[1]):
                m, e = mean_stderr(dens[:, r])
                rows.append([L, p, r + 1, m, e, cfg.n_samples])
                per_round.setdefault((L, r + 1), []).append((m, e))
    summary = {}
    for L in sorted({k[0] for k in per_round}):
        # Density curves of successive rounds cross at the decoder's threshold.
        curves = [Curve(cfg.grid, [v[0] for v in vals], [v[1] for v in vals], r)
                  for (l, r), vals in sorted(per_round.items()) if l == L]
        summary[str(L)] = _curve_summary(curves)
    return ["L", "p", "round", "mean", "stderr", "n_samples"], rows, summary


def run_kappa_exact(cfg):
    rows, sums = [], {}
    for lx, ly in cfg.sizes:
        lat = lt.build_torus(lx, ly)
        for t in cfg.grid:
            table = kappa_exact(product_state(lat, math.pi * t), lat)
            sums["%dx%d@%s" % (lx, ly, _fmt(t))] = sum_max_kappa(table)
            for m, qx, qy, kap in table.rows(nonzero_only=True):
                rows.append([lx, ly, t, m, qx, qy, kap])
    return ["Lx", "Ly", "theta", "m", "q_x", "q_y", "kappa"], rows, {"sum_max_kappa": sums}


def run_rbim_check(cfg):
    rows, worst = [], 0.0
    for lx, ly in cfg.sizes:
        lat = lt.build_torus(lx, ly)
        for g in cfg.grid:
            for rep in rbim.ising_twist_identities(lat, float(g)):
                rows.append([rep["lattice"], rep["g_x"], rep["identity"], rep["lhs_log"], rep["rhs_log"],
                             rep["rel_err"]])
                worst = max(worst, rep["rel_err"])
    return ["lattice", "g_x", "identity", "lhs_log", "rhs_log", "rel_err"], rows, {"max_rel_err": worst}


def run_rg_disorder(cfg):
    rows, curves = [], []
    for L in _square(cfg.sizes, "rg-disorder"):
        nm = max_rounds(L)
        top_m, top_e = [], []
        for k, t in enumerate(cfg.grid):
            stream = (STREAM["rg-disorder"], L, k)
            vals = map_samples(_rg_chunk, cfg.n_samples, (L, product_p(t), cfg.seed, stream, nm), cfg.workers)
            for r in range(nm + 1):
                m, e = mean_stderr(vals[:, r])
                rows.append([t, r, m, e, cfg.n_samples, L])
            top_m.append(m)
            top_e.append(e)
        curves.append(Curve(cfg.grid, top_m, top_e, L, cfg.n_samples))
    summary = _curve_summary(curves)
    if len(curves) >= 2 and cfg.extra.get("nu"):
        xc = summary["crossing"]["x_c"] if cfg.extra.get("xc") is None else cfg.extra["xc"]
        if xc is not None:
            summary["collapse"] = {"x_c": xc, "nu": cfg.extra["nu"],
                                   "quality": data_collapse(curves, xc, cfg.extra["nu"]).quality}
    return ["theta_or_params", "n_rg", "mean", "stderr", "n_samples", "L"], rows, summary


def run_planar_scan(cfg):
    rows, curves = [], []
    for N in _square(cfg.sizes, "planar-scan"):
        region = centered_region(N)
        means, errs = [], []
        for k, p in enumerate(cfg.grid):
            stream = (STREAM["planar-scan"], N, k)
            m, e = mean_stderr(map_samples(_planar_chunk, cfg.n_samples, (N, float(p), cfg.seed, stream),
                                           cfg.workers))
            means.append(m)
            errs.append(e)
            rows.append([p, N, "%dx%d" % (region.full.Lx, region.full.Ly), m, e, cfg.n_samples])
        curves.append(Curve(cfg.grid, means, errs, N, cfg.n_samples))
    return ["p_or_theta", "A_size", "system_size", "mean", "stderr", "n_samples"], rows, _curve_summary(curves)


def run_chain_ising(cfg):
    h_z = float(cfg.extra.get("hz", 0.0))
    rows = []
    for L, _ in cfg.sizes:
        for k, h_x in enumerate(cfg.grid):
            stream = (STREAM["chain-ising"], L, k, int(round(1e6 * h_z)))
            vals = map_samples(_ising_chunk, cfg.n_samples, (L, float(h_x), h_z, cfg.seed, stream), cfg.workers)
            m, e = mean_stderr(vals)
            rows.append(["ising", "h_x=%s;h_z=%s" % (_fmt(h_x), _fmt(h_z)), L, m, e, cfg.n_samples])
    return ["model", "params", "L", "indicator", "stderr", "n_samples"], rows, {}


def run_chain_spt(cfg):
    rows = []
    for L, _ in cfg.sizes:
        L_sub = int(cfg.extra.get("sub") or L // 2)
        if L_sub % 2 or not 2 <= L_sub < L:
            raise ValueError("subsystem length must be even and smaller than the chain")
        for k, delta in enumerate(cfg.grid):
            stream = (STREAM["chain-spt"], L, L_sub, k)
            vals = map_samples(_spt_chunk, cfg.n_samples, (L, L_sub, float(delta), cfg.seed, stream), cfg.workers)
            m, e = mean_stderr(vals)
            rows.append(["spt", "delta=%s;L_sub=%d" % (_fmt(delta), L_sub), L, m, e, cfg.n_samples])
    return ["model", "params", "L", "indicator", "stderr", "n_samples"], rows, {}


def run_criterion_1d(cfg):
    rows = []
    for L, _ in cfg.sizes:
        for t in cfg.grid:
            rows.append(["product", "theta=%s" % _fmt(t), L, chain1d.criterion_1d(math.pi * t, L), 0.0, 0])
    return ["model", "params", "L", "indicator", "stderr", "n_samples"], rows, {}


def run_collapse(cfg):
    path = cfg.extra.get("input")
    if not path:
        raise ValueError("collapse needs --input")
    with open(path) as fh:
        curves = curves_from_csv(fh.read())
    nu = cfg.extra.get("nu")
    xc = cfg.extra.get("xc")
    if xc is None:
        res = crossing_estimate(curves)
        if not res.found:
            raise ValueError("no crossing in the input curves")
        xc = res.x_c
    if nu is None:
        xc, nu, _ = collapse_scan(curves, [xc], np.arange(0.5, 3.0001, 0.05))
    result = data_collapse(curves, xc, nu)
    rows = []
    for c, pts in zip(curves, result.points):
        rows += [[c.L, u, y] for u, y in pts]
    summary = {"x_c": xc, "err": None, "method": "data_collapse", "nu": nu, "quality": result.quality,
               "inputs": [path]}
    return ["L", "scaled_x", "mean"], rows, summary


PIPELINES = {
    "wz-scan": run_wz_scan,
    "local-scan": run_local_scan,
    "kappa-exact": run_kappa_exact,
    "rbim-check": run_rbim_check,
    "rg-disorder": run_rg_disorder,
    "planar-scan": run_planar_scan,
    "chain-ising": run_chain_ising,
    "chain-spt": run_chain_spt,
    "criterion-1d": run_criterion_1d,
    "collapse": run_collapse,
}

NEEDS_GRID = set(PIPELINES) - {"collapse"}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def run(cfg: ExperimentConfig):
    if cfg.experiment not in PIPELINES:
        raise ValueError(f"unknown experiment {cfg.experiment!r}")
    if cfg.decoder not in DECODERS:
        raise ValueError(f"unknown decoder {cfg.decoder!r}; choose from {DECODERS}")
    if cfg.experiment in NEEDS_GRID and (cfg.grid is None or len(cfg.grid) == 0):
        raise ValueError(f"{cfg.experiment} needs --grid")
    return PIPELINES[cfg.experiment](cfg)
