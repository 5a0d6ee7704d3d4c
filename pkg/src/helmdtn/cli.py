"""Command-line entry point: ``helmdtn <experiment> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments as ex
from .geometry import GeometryError


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="helmdtn", description=__doc__)
    p.add_argument("experiment", nargs="?", choices=ex.EXPERIMENTS,
                   help="experiment to run (optional with --manifest or --preset)")
    p.add_argument("--preset", choices=sorted(ex.PRESETS))
    p.add_argument("--manifest", help="re-run from a manifest.json written by an earlier run")
    p.add_argument("--kappa", type=float)
    p.add_argument("--r0", type=float)
    p.add_argument("--rho", type=_floats, help="comma-separated source radii")
    p.add_argument("--n", type=_ints, help="comma-separated N values")
    p.add_argument("--mode", type=int, help="Fourier mode of the exact solution")
    p.add_argument("--layers", type=int, help="radial mesh layers (default: automatic)")
    p.add_argument("--h-max", type=float, dest="h_max", help="mesh size bound used when --layers is not given")
    p.add_argument("--grid", type=int, help="points per side of the output grid, 0 to skip")
    p.add_argument("--coupling", choices=("galerkin", "literal"))
    p.add_argument("--boundary", help="circle:<r>, star64 or fourier:<mean>;cos:a,k,phi;sin:a,k,phi")
    p.add_argument("--repeats", type=int)
    p.add_argument("--singular-rtol", type=float, dest="singular_rtol")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=None, help="output directory (default: results/<experiment>)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.manifest:
        cfg = ex.config_from_manifest(args.manifest)
        if args.out:
            cfg.out = args.out
    else:
        if args.experiment is None and args.preset is None:
            print("helmdtn: need an experiment, --preset or --manifest", file=sys.stderr)
            return 2
        keys = ("kappa", "r0", "rho", "n", "mode", "layers", "grid", "coupling",
                "boundary", "repeats", "singular_rtol", "seed", "h_max")
        overrides = {k: getattr(args, k) for k in keys}
        try:
            cfg = ex.resolve_config(args.experiment, args.preset, **overrides)
        except ValueError as exc:
            print(f"helmdtn: {exc}", file=sys.stderr)
            return 2
        cfg.out = args.out or f"results/{cfg.experiment}"
    try:
        report = ex.run(cfg)
    except GeometryError as exc:
        print(f"helmdtn: {exc}", file=sys.stderr)
        return 2
    summary = {k: v for k, v in report.items() if k != "records"}
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
