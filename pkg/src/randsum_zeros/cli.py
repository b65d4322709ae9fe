"""Command-line entry point: ``randsum-zeros <density|sample|compare|verify>``.

Exit status is 0 on success, 1 when a check fails or a run breaks down, and
2 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import quadrature, verify
from .basis import FAMILY_NAMES, BasisFamily, Kind
from .density import g_density_imag_axis, real_intensity
from .errors import ParseError, RandsumError, TooFewTrials, ValidationError
from .montecarlo import compare_histogram, run_trials
from .render_io import (
    IntensityGrid,
    RunConfig,
    compute_grid,
    grid_to_image,
    load_config,
    write_csv_profile,
    write_grayscale,
    write_pgm,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# tolerances of the verify subcommand
TOL_CHOLESKY = 1e-10
TOL_WIRTINGER = 1e-5
ORDER_RATIO = (3.5, 4.5)
TOL_PARTIALS = 1e-5
TOL_JUMP = 1e-6
TOL_STRADDLE = 1e-3


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


def _prefix(cfg: RunConfig) -> Path:
    p = Path(cfg.output)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _with_suffix(prefix: Path, suffix: str) -> Path:
    return prefix.with_name(prefix.name + suffix)


# -- subcommands


def cmd_density(cfg: RunConfig) -> int:
    grid = compute_grid(cfg.family, cfg.window, cfg.render)
    prefix = _prefix(cfg)
    write_grayscale(grid, _with_suffix(prefix, ".pgm"), cfg.render.scaling, cfg.render.invert)
    xs = grid.x_centers()
    g = grid.g_values if grid.g_values is not None else real_intensity(cfg.family, xs)
    write_csv_profile(xs, g, _with_suffix(prefix, "_g.csv"))
    if cfg.family.kind is Kind.FOURIER_COSINE:
        ys = grid.y_centers()
        write_csv_profile(ys, g_density_imag_axis(cfg.family, ys), _with_suffix(prefix, "_g_imag.csv"), header="y,g")
    print(f"wrote {prefix}.pgm ({grid.nx}x{grid.ny})")
    return EXIT_OK


def histogram_image(hist, scaling: str = "separate", invert: bool = False) -> np.ndarray:
    """Grey-scale image of root counts; real-root bins go on the axis row when they match the columns."""
    nx, ny = hist.grid.shape
    axis = hist.axis_bins.astype(float) if hist.axis_bins.size == nx and hist.window.straddles_real_axis else None
    grid = IntensityGrid(hist.window, nx, ny, hist.grid.astype(float), axis, hist.family.name, hist.family.n)
    return grid_to_image(grid, scaling, invert)


def cmd_sample(cfg: RunConfig) -> int:
    hist = run_trials(cfg.trial_config(keep_roots=True))
    prefix = _prefix(cfg)
    write_pgm(_with_suffix(prefix, "_hist.pgm"), histogram_image(hist, cfg.render.scaling, cfg.render.invert))
    lines = ["re,im,trial"]
    lines += [f"{z.real:.17g},{z.imag:.17g},{t}" for z, t in zip(hist.roots, hist.root_trials)]
    _with_suffix(prefix, "_roots.csv").write_text("\n".join(lines) + "\n")
    summary = hist.summary()
    summary["seed"] = cfg.seed
    summary["trials"] = cfg.trials
    _write_json(_with_suffix(prefix, "_summary.json"), summary)
    print(f"{hist.trials_completed} trials, mean real roots {hist.mean_real_roots:.6g}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, against: Optional[str] = None) -> int:
    hist = run_trials(cfg.trial_config())
    target = cfg.family if against is None else BasisFamily.from_name(against, cfg.family.n)
    report = compare_histogram(hist, target)
    out = report.as_dict()
    out["sampled_family"] = cfg.family.name
    out["seed"] = cfg.seed
    _write_json(_with_suffix(_prefix(cfg), "_compare.json"), out)
    print(f"compare {cfg.family.name} sample against {target.name} intensity: {'pass' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def run_verify(rectangles_per_family: int = 4, jump_points: int = 50, wirtinger_points: int = 100) -> dict:
    """All oracle sweeps with their pass flags."""
    report: dict = {}
    chol = verify.cholesky_sweep()
    report["cholesky"] = {**chol, "passed": chol["max_rel_dev"] < TOL_CHOLESKY}

    wirt = verify.wirtinger_sweep(points_per_family=wirtinger_points)
    ok = all(
        v["max_rel_err"] < TOL_WIRTINGER and ORDER_RATIO[0] <= v["median_order_ratio"] <= ORDER_RATIO[1]
        for v in wirt.values()
    )
    report["wirtinger"] = {"families": wirt, "passed": ok}

    parts = verify.partials_sweep()
    report["conjugate_partials"] = {
        "families": parts,
        "passed": all(max(v.values()) < TOL_PARTIALS for v in parts.values()),
    }

    jump = verify.jump_sweep(points_per_family=jump_points)
    report["jump_limits"] = {"families": jump, "passed": all(v["max_err"] < TOL_JUMP for v in jump.values())}

    stokes = verify.stokes_sweep(rectangles_per_family=rectangles_per_family)
    power = BasisFamily(Kind.POWER, 10)
    w = quadrature.Window(-3.0, 3.0, -3.0, 3.0)
    contour = quadrature.expected_zeros_contour(power, w)
    area = quadrature.expected_zeros_area(power, w)
    report["stokes"] = {
        "families": stokes,
        "straddling": {"contour": contour, "area": area, "rel_gap": abs(contour - area) / abs(area)},
        "passed": all(v["max_gap_over_tolerance"] <= 1.0 for v in stokes.values())
        and abs(contour - area) <= TOL_STRADDLE * abs(area),
    }
    report["passed"] = all(v["passed"] for v in report.values() if isinstance(v, dict))
    return report


def cmd_verify(cfg: RunConfig, full: bool = False) -> int:
    report = run_verify(rectangles_per_family=20 if full else 4)
    _write_json(_with_suffix(_prefix(cfg), "_verify.json"), report)
    for name, part in report.items():
        if isinstance(part, dict):
            print(f"{name}: {'pass' if part['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_FAIL


# -- argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randsum-zeros",
        description="Zero intensities of random sums with Gaussian coefficients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "density": "render h and g for a family and write <prefix>.pgm and <prefix>_g.csv",
        "sample": "Monte Carlo roots: <prefix>_hist.pgm, <prefix>_roots.csv, <prefix>_summary.json",
        "compare": "test a Monte Carlo histogram against the intensities",
        "verify": "run the oracle sweeps and write <prefix>_verify.json",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--family", help=f"override the family ({', '.join(FAMILY_NAMES)})")
        p.add_argument("--n", type=int, help="override n")
        p.add_argument("--trials", type=int, help="override the trial count")
        p.add_argument("--seed", type=int, help="override the seed")
        p.add_argument("--out", help="override the output prefix")
        p.add_argument("--invert", action="store_true", default=None, help="render dense regions dark")
        if name == "compare":
            p.add_argument("--against", help="compare against this family's intensity instead")
        if name == "verify":
            p.add_argument("--full", action="store_true", help="20 Stokes rectangles per family instead of 4")
    return parser


def _load(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
    else:
        if args.family is None or args.n is None:
            raise ParseError("$", "give --config, or both --family and --n")
        cfg = RunConfig(family=BasisFamily.from_name(args.family, args.n))
    if args.family is not None and args.family not in FAMILY_NAMES:
        raise ParseError("family", f"unknown family {args.family!r}; expected one of {', '.join(FAMILY_NAMES)}")
    return cfg.with_overrides(family=args.family, n=args.n, trials=args.trials, seed=args.seed,
                              output=args.out, invert=args.invert)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "density":
            return cmd_density(cfg)
        if args.command == "sample":
            return cmd_sample(cfg)
        if args.command == "compare":
            if args.against is not None and args.against not in FAMILY_NAMES:
                raise ParseError("against", f"unknown family {args.against!r}")
            return cmd_compare(cfg, args.against)
        return cmd_verify(cfg, args.full)
    except (ParseError, ValidationError, TooFewTrials) as exc:
        print(f"randsum-zeros: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RandsumError, OSError) as exc:
        print(f"randsum-zeros: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
