import numpy as np
import pytest

from oneform import lattice as lt
from oneform import planar as pl
from oneform import qstate as qs
from oneform.decode import DecodeResult, mwpm_pairs


def _cyl_errors(lat, p, seed, n):
    return qs.error_batch(lat, p, seed, 0, n)


def test_no_errors_scores_one():
    region = pl.centered_region(8)
    e = np.zeros((5, region.full.n_edges), dtype=bool)
    assert np.all(pl.folded_scores(region, e) == 1)


def test_low_p_close_to_one():
    region = pl.RegionSpec(lt.build_cylinder(8, 16), 0, 4, 8, 8)
    mean, err = pl.folded_indicator(_cyl_errors(region.full, 0.05, 1, 400), region)
    assert mean > 0.95


def test_plateau_above_zero_at_high_p():
    region = pl.centered_region(8)
    mean, err = pl.folded_indicator(_cyl_errors(region.full, 0.15, 2, 600), region)
    assert mean - 3 * err > 0


def test_split_audit():
    full = lt.build_cylinder(16, 32)
    region = pl.RegionSpec(full, 0, 8, 16, 16)
    e = _cyl_errors(full, 0.1, 3, 30)
    for row in e:
        syn = lt.syndrome(full, row)
        pairs, bnd = mwpm_pairs(full, syn)
        split = pl.split_strings(DecodeResult(None, None, "mwpm", None, pairs, bnd), region)
        ina = region.contains(np.arange(full.n_plaquettes))
        a_charges = set(np.flatnonzero(syn & ina))
        straddle = sum(1 for a, b in pairs if ina[a] != ina[b])
        to_bnd = sum(1 for a in bnd if ina[a])
        assert split.removed.size == straddle + to_bnd
        kept = set(split.S_A.ravel().tolist())
        assert kept | set(split.removed.tolist()) == a_charges
        assert split.residual.sum() == len(kept)
        assert split.residual.sum() % 2 == 0


def test_in_a_parity_matches_chain():
    full = lt.build_cylinder(8, 16)
    region = pl.RegionSpec(full, 0, 4, 8, 8)
    for row in _cyl_errors(full, 0.12, 4, 200):
        pairs, bnd = mwpm_pairs(full, lt.syndrome(full, row))
        split = pl.split_strings(DecodeResult(None, None, "mwpm", None, pairs, bnd), region)
        _, oy = pl._in_a_parities(region, split.S_A)
        if not split.S_A.size:
            assert oy == 0
            continue
        # Rebuild the same strings in A's frame, where row 0 is the first row of A.
        x, y = full.plaquette_coords(split.S_A)
        shifted = ((y - region.y0) % full.Ly) * full.Lx + x
        chain = lt.pairs_chain(full, shifted)
        cross = sum(int(chain[full.edge(c, 0, lt.EAST)]) for c in range(full.Lx))
        assert oy == cross % 2


def test_region_validation():
    cyl = lt.build_cylinder(8, 16)
    with pytest.raises(ValueError):
        pl.RegionSpec(lt.build_torus(8, 8), 0, 0, 4, 4)
    with pytest.raises(ValueError):
        pl.RegionSpec(cyl, 0, 0, 8, 16)
    with pytest.raises(ValueError):
        pl.RegionSpec(cyl, 0, 0, 3, 4)
    with pytest.raises(ValueError):
        pl.RegionSpec(cyl, 1, 0, 7, 4)
    with pytest.raises(ValueError):
        pl.folded_score(pl.centered_region(8), np.zeros(128, dtype=bool), "ml")


def test_interior_region_scores():
    cyl = lt.build_cylinder(12, 12)
    region = pl.RegionSpec(cyl, 2, 2, 8, 8)
    assert region.seam_x and region.seam_y
    vals = pl.folded_scores(region, _cyl_errors(cyl, 0.03, 5, 100))
    assert set(np.unique(vals)) <= {-1, 1} and vals.mean() > 0.8
