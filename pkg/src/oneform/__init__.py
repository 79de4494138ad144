"""Detecting emergent 1-form symmetries by decoding: lattices, states, decoders and scans."""
from . import analysis, chain1d, decode, lattice, planar, qstate, rbim, rg2d
from .analysis import Curve, crossing_estimate, data_collapse
from .decode import decode as decode_syndrome
from .lattice import build_cylinder, build_torus

__all__ = ["analysis", "chain1d", "decode", "lattice", "planar", "qstate", "rbim", "rg2d",
           "Curve", "crossing_estimate", "data_collapse", "decode_syndrome", "build_torus", "build_cylinder"]
