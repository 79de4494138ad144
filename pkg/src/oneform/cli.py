"""Command-line entry point: `oneform --experiment NAME --L 8 --L 12 --grid 0.08:0.13:0.005 --seed 1 --out out.csv`.

Writes a CSV whose leading '#' lines carry the tool version, the config echo,
the seed and the lattice headers, plus a JSON summary next to it (same stem,
.json suffix). On any error both files are removed and the exit status is
nonzero.
"""
import argparse
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import lattice as lt
from .experiments import PIPELINES, ExperimentConfig, _fmt, run
from .decode import DECODERS

SCHEMA_VERSION = 1
CHAIN_EXPERIMENTS = ("chain-ising", "chain-spt", "criterion-1d")


def tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def parse_size(text: str):
    parts = text.lower().split("x")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}; use N or NxM")
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) < 2:
        raise argparse.ArgumentTypeError(f"bad size {text!r}")
    return tuple(vals)


def parse_grid(text: str) -> np.ndarray:
    """start:stop:step with the stop value included, or a comma list."""
    try:
        if ":" not in text:
            return np.array(sorted(float(v) for v in text.split(",")))
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use start:stop:step")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 10)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oneform", description=__doc__.splitlines()[0])
    ap.add_argument("--experiment", required=True, choices=sorted(PIPELINES))
    ap.add_argument("--L", dest="sizes", action="append", type=parse_size, default=[],
                    help="lattice or chain size, N or NxM (repeatable)")
    ap.add_argument("--grid", type=parse_grid, help="parameter grid start:stop:step (theta in units of pi)")
    ap.add_argument("--decoder", default="mwpm", help="one of " + ", ".join(DECODERS))
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", required=True, help="CSV path; the summary goes to the same stem with .json")
    ap.add_argument("--workers", type=int, default=1, help="overridden by ONEFORM_WORKERS")
    ap.add_argument("--hz", type=float, help="longitudinal field for chain-ising")
    ap.add_argument("--sub", type=int, help="subsystem length for chain-spt")
    ap.add_argument("--nu", type=float, help="exponent for collapse / rg-disorder")
    ap.add_argument("--xc", type=float, help="critical point for collapse")
    ap.add_argument("--input", help="input CSV for collapse")
    return ap


def config_from_args(args) -> ExperimentConfig:
    if args.samples < 1:
        raise ValueError("--samples must be positive")
    if args.seed < 0:
        raise ValueError("--seed must be non-negative")
    if not args.sizes and args.experiment != "collapse":
        raise ValueError("at least one --L is required")
    extra = {k: getattr(args, k) for k in ("hz", "sub", "nu", "xc", "input") if getattr(args, k) is not None}
    return ExperimentConfig(args.experiment, args.sizes, args.grid, args.decoder, args.samples, args.seed,
                            args.out, args.workers, extra)


def _headers(cfg):
    if cfg.experiment in CHAIN_EXPERIMENTS:
        return [f"chain L={L} boundary=periodic" for L, _ in cfg.sizes]
    if cfg.experiment == "planar-scan":
        return [lt.build_cylinder(N, 2 * N).header() + f" A={N}x{N}" for N, _ in cfg.sizes]
    return [lt.TorusLattice(lx, ly).header() for lx, ly in cfg.sizes]


def summary_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".json"


def write_outputs(cfg, columns, rows, summary):
    echo = cfg.echo()
    lines = [f"# oneform {tool_version()}",
             "# config " + json.dumps(echo, sort_keys=True),
             f"# seed {cfg.seed}"]
    lines += ["# lattice " + h for h in _headers(cfg)]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    with open(cfg.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    doc = {"schema_version": SCHEMA_VERSION, "tool_version": tool_version(), "config": echo,
           "lattices": _headers(cfg), "summary": summary}
    with open(summary_path(cfg.out), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    targets = [args.out, summary_path(args.out)]
    try:
        cfg = config_from_args(args)
        columns, rows, summary = run(cfg)
        write_outputs(cfg, columns, rows, summary)
    except Exception as exc:
        for path in targets:
            if os.path.exists(path):
                os.remove(path)
        print(f"oneform: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
