"""Grey-scale rendering, CSV profiles and run configuration.

Images are binary PGM (P5, maxval 255) with the top row at ymax. The
real-axis density is painted onto the single pixel row whose centre lies
nearest y = 0 and, under ``separate`` scaling, gets its own black and white
points.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .basis import FAMILY_NAMES, BasisFamily, Kind
from .density import DEFAULT_BAND, AxisBand, real_intensity
from .errors import OutputWriteError, ParseError, ValidationError
from .montecarlo import TrialConfig
from .quadrature import QuadratureSpec, Window, h_on_points

SCALINGS = ("separate", "joint")


@dataclass(frozen=True)
class RenderSpec:
    nx: int = 440
    ny: int = 440
    scaling: str = "separate"
    invert: bool = False

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise ValidationError(f"render grid must be at least 16x16, got {self.nx}x{self.ny}")
        if self.scaling not in SCALINGS:
            raise ValidationError(f"scaling must be one of {', '.join(SCALINGS)}, got {self.scaling!r}")


@dataclass(frozen=True)
class IntensityGrid:
    """h at pixel centres (``h_values[i, k]`` at column i, row k from ymin) and g along the axis."""

    window: Window
    nx: int
    ny: int
    h_values: np.ndarray
    g_values: Optional[np.ndarray] = None
    family: str = ""
    n: int = 0

    def __post_init__(self):
        if self.h_values.shape != (self.nx, self.ny):
            raise ValidationError(f"h_values has shape {self.h_values.shape}, expected {(self.nx, self.ny)}")
        if np.any(self.h_values < 0):
            raise ValidationError("h_values must be non-negative")
        if self.g_values is not None:
            if self.g_values.shape != (self.nx,):
                raise ValidationError(f"g_values has shape {self.g_values.shape}, expected {(self.nx,)}")
            if np.any(self.g_values < 0):
                raise ValidationError("g_values must be non-negative")

    def x_centers(self) -> np.ndarray:
        return pixel_centers(self.window.xmin, self.window.xmax, self.nx)

    def y_centers(self) -> np.ndarray:
        return pixel_centers(self.window.ymin, self.window.ymax, self.ny)


def pixel_centers(lo: float, hi: float, count: int) -> np.ndarray:
    step = (hi - lo) / count
    return lo + step * (np.arange(count) + 0.5)


def compute_grid(family: BasisFamily, window: Window, spec: RenderSpec = RenderSpec(),
                 band: AxisBand = DEFAULT_BAND) -> IntensityGrid:
    """h at every pixel centre, and g at the column centres when the window meets the real axis."""
    xs = pixel_centers(window.xmin, window.xmax, spec.nx)
    ys = pixel_centers(window.ymin, window.ymax, spec.ny)
    h = h_on_points(family, xs[:, None] + 1j * ys[None, :], band)
    g = real_intensity(family, xs) if window.straddles_real_axis else None
    return IntensityGrid(window, spec.nx, spec.ny, h, g, family.name, family.n)


def scale_to_bytes(values: np.ndarray, vmin: float | None = None, vmax: float | None = None) -> np.ndarray:
    """round(255 (v - vmin) / (vmax - vmin)) as uint8; all zeros when vmax == vmin."""
    v = np.asarray(values, dtype=float)
    lo = float(np.min(v)) if vmin is None else vmin
    hi = float(np.max(v)) if vmax is None else vmax
    if v.size == 0 or not hi > lo:
        return np.zeros(v.shape, dtype=np.uint8)
    # half-up rounding, independent of numpy's round-half-even
    return np.floor(255.0 * (v - lo) / (hi - lo) + 0.5).clip(0, 255).astype(np.uint8)


def axis_row(window: Window, ny: int) -> Optional[int]:
    """Index (from ymin) of the pixel row whose centre is nearest y = 0, if the window meets the axis."""
    if not window.straddles_real_axis:
        return None
    return int(np.argmin(np.abs(pixel_centers(window.ymin, window.ymax, ny))))


def grid_to_image(grid: IntensityGrid, scaling: str = "separate", invert: bool = False) -> np.ndarray:
    """(ny, nx) uint8 image, top row at ymax."""
    if scaling not in SCALINGS:
        raise ValidationError(f"scaling must be one of {', '.join(SCALINGS)}, got {scaling!r}")
    h = grid.h_values.T.astype(float)
    row = axis_row(grid.window, grid.ny) if grid.g_values is not None else None
    if row is None:
        img = scale_to_bytes(h)
    else:
        g = np.asarray(grid.g_values, dtype=float)
        rest = np.delete(h, row, axis=0)
        if scaling == "separate":
            img = scale_to_bytes(h, float(np.min(rest)), float(np.max(rest))) if rest.size else np.zeros(h.shape, np.uint8)
            img[row] = scale_to_bytes(g)
        else:
            both = np.concatenate([rest.ravel(), g])
            lo, hi = float(np.min(both)), float(np.max(both))
            img = scale_to_bytes(h, lo, hi)
            img[row] = scale_to_bytes(g, lo, hi)
    if invert:
        img = 255 - img
    return np.ascontiguousarray(img[::-1])


def write_pgm(path, image: np.ndarray) -> None:
    """Write a (rows, cols) uint8 array as binary PGM."""
    image = np.asarray(image, dtype=np.uint8)
    rows, cols = image.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(image.tobytes())
    except OSError as exc:
        raise OutputWriteError(f"cannot write {path}: {exc}") from exc


def read_pgm(path) -> np.ndarray:
    """Read back a binary PGM written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError(f"{path} is not a binary PGM")
    cols, rows = (int(t) for t in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8, count=rows * cols).reshape(rows, cols)


def write_grayscale(grid: IntensityGrid, path, scaling: str = "separate", invert: bool = False) -> None:
    write_pgm(path, grid_to_image(grid, scaling, invert))


def write_csv_profile(xs, values, path, header: str = "x,g") -> None:
    """Two-column CSV with 17 significant digits, so values round-trip exactly."""
    xs = np.asarray(xs, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if xs.shape != values.shape:
        raise ValidationError(f"xs and values differ in length ({xs.size} vs {values.size})")
    lines = [header] + [f"{x:.17g},{v:.17g}" for x, v in zip(xs, values)]
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputWriteError(f"cannot write {path}: {exc}") from exc


def read_csv_profile(path) -> tuple[np.ndarray, np.ndarray]:
    rows = Path(path).read_text().splitlines()[1:]
    if not rows:
        return np.empty(0), np.empty(0)
    arr = np.array([[float(t) for t in r.split(",")] for r in rows])
    return arr[:, 0], arr[:, 1]


# -- configuration


@dataclass(frozen=True)
class Bins:
    """Histogram resolution for Monte Carlo runs."""

    nx: int = 64
    ny: int = 64
    axis: int = 64


@dataclass(frozen=True)
class RunConfig:
    family: BasisFamily
    window: Window = Window(-2.0, 2.0, -2.0, 2.0)
    render: RenderSpec = RenderSpec()
    trials: int = 0
    seed: int = 0
    real_tol: float = 1e-8
    quadrature: QuadratureSpec = QuadratureSpec()
    bins: Bins = field(default_factory=Bins)
    output: str = "randsum"

    def trial_config(self, keep_roots: bool = False) -> TrialConfig:
        return TrialConfig(
            family=self.family,
            trials=self.trials,
            seed=self.seed,
            window=self.window,
            real_tol=self.real_tol,
            nx=self.bins.nx,
            ny=self.bins.ny,
            axis_bins=self.bins.axis,
            keep_roots=keep_roots,
        )

    def with_overrides(self, *, family: str | None = None, n: int | None = None, trials: int | None = None,
                       seed: int | None = None, output: str | None = None, invert: bool | None = None) -> RunConfig:
        cfg = self
        if family is not None or n is not None:
            fam = BasisFamily.from_name(family or cfg.family.name, cfg.family.n if n is None else n)
            cfg = replace(cfg, family=fam)
        if trials is not None:
            cfg = replace(cfg, trials=_check_trials(trials))
        if seed is not None:
            cfg = replace(cfg, seed=_check_seed(seed))
        if output is not None:
            cfg = replace(cfg, output=output)
        if invert is not None:
            cfg = replace(cfg, render=replace(cfg.render, invert=invert))
        return cfg


_TOP_KEYS = {"family", "n", "window", "grid", "seed", "trials", "output",
             "invert", "scaling", "real_tol", "quadrature", "bins"}
_REQUIRED = ("family", "n")


def _check_trials(v: int) -> int:
    if v < 0:
        raise ValidationError(f"trials must be >= 0, got {v}")
    return v


def _check_seed(v: int) -> int:
    if not 0 <= v < 1 << 64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {v}")
    return v


def _get(obj: dict, key: str, path: str, kind, default=None, required: bool = False):
    where = f"{path}.{key}" if path else key
    if key not in obj:
        if required:
            raise ParseError(where, "missing required key")
        return default
    val = obj[key]
    if kind is int:
        ok = isinstance(val, int) and not isinstance(val, bool)
    elif kind is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
        val = float(val) if ok else val
    else:
        ok = isinstance(val, kind)
    if not ok:
        raise ParseError(where, f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}")
    return val


def _section(doc: dict, key: str, allowed: set[str]) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict):
        raise ParseError(key, "expected an object")
    for k in sec:
        if k not in allowed:
            raise ParseError(f"{key}.{k}", "unknown key")
    return sec


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Raises
    ------
    ParseError
        Malformed JSON, unknown or missing keys, wrong types; ``path`` names the key.
    ValidationError
        Well-typed values that break an invariant (for example ``n = 0``).
    """
    try:
        doc: Any = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise ParseError("$", "expected a JSON object")
    for k in doc:
        if k not in _TOP_KEYS:
            raise ParseError(k, "unknown key")

    name = _get(doc, "family", "", str, required=True)
    n = _get(doc, "n", "", int, required=True)
    try:
        Kind(name)
    except ValueError:
        raise ParseError("family", f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}") from None
    family = BasisFamily.from_name(name, n)

    cfg = RunConfig(family=family)
    if "window" in doc:
        w = _section(doc, "window", {"xmin", "xmax", "ymin", "ymax"})
        vals = [_get(w, k, "window", float, required=True) for k in ("xmin", "xmax", "ymin", "ymax")]
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"window bounds must be finite, got {vals}")
        cfg = replace(cfg, window=Window(*vals))

    g = _section(doc, "grid", {"nx", "ny"})
    scaling = _get(doc, "scaling", "", str, "separate")
    invert = _get(doc, "invert", "", bool, False)
    cfg = replace(cfg, render=RenderSpec(
        nx=_get(g, "nx", "grid", int, 440), ny=_get(g, "ny", "grid", int, 440), scaling=scaling, invert=invert))

    cfg = replace(
        cfg,
        trials=_check_trials(_get(doc, "trials", "", int, 0)),
        seed=_check_seed(_get(doc, "seed", "", int, 0)),
        output=_get(doc, "output", "", str, "randsum"),
    )
    real_tol = _get(doc, "real_tol", "", float, 1e-8)
    if not real_tol > 0:
        raise ValidationError(f"real_tol must be positive, got {real_tol}")
    cfg = replace(cfg, real_tol=real_tol)

    q = _section(doc, "quadrature", {"nodes_per_side", "grid_nx", "grid_ny", "axis_nodes"})
    if q:
        base = QuadratureSpec()
        cfg = replace(cfg, quadrature=QuadratureSpec(
            nodes_per_side=_get(q, "nodes_per_side", "quadrature", int, base.nodes_per_side),
            grid_nx=_get(q, "grid_nx", "quadrature", int, base.grid_nx),
            grid_ny=_get(q, "grid_ny", "quadrature", int, base.grid_ny),
            axis_nodes=_get(q, "axis_nodes", "quadrature", int, base.axis_nodes),
        ))
    b = _section(doc, "bins", {"nx", "ny", "axis"})
    if b:
        bins = Bins(_get(b, "nx", "bins", int, 64), _get(b, "ny", "bins", int, 64), _get(b, "axis", "bins", int, 64))
        for k, v in vars(bins).items():
            if v < 1:
                raise ValidationError(f"bins.{k} must be >= 1, got {v}")
        cfg = replace(cfg, bins=bins)
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError("$", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
