"""Expected zero counts over rectangles.

Two independent routes: the contour integral (1/2 pi i) of F around the
boundary, and the area integral of h plus line integrals of the real-axis
(and, for the cosine family, imaginary-axis) densities.

Both routes cut the window along the family's vanishing lines. F jumps
across them and h has a kink there, so each piece is smooth on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import BasisFamily, Kind
from .density import (
    DEFAULT_BAND,
    AxisBand,
    expectation,
    f_expectation,
    g_density_imag_axis,
    h_density,
    kernels_at,
    real_intensity,
)
from .errors import ContourTooCloseToAxis, ValidationError

# points per chunk when evaluating densities over large grids
CHUNK = 1 << 15


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        vals = (self.xmin, self.xmax, self.ymin, self.ymax)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"window bounds must be finite, got {vals}")
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValidationError(f"window needs xmin < xmax and ymin < ymax, got {vals}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def straddles_real_axis(self) -> bool:
        return self.ymin < 0 < self.ymax

    def as_dict(self) -> dict:
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin, "ymax": self.ymax}


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_side: int = 16
    grid_nx: int = 256
    grid_ny: int = 256
    axis_nodes: int = 256

    def __post_init__(self):
        if self.nodes_per_side < 8:
            raise ValidationError(f"nodes_per_side must be >= 8, got {self.nodes_per_side}")
        if self.grid_nx < 32 or self.grid_ny < 32:
            raise ValidationError(f"grid_nx and grid_ny must be >= 32, got {self.grid_nx}x{self.grid_ny}")
        if self.axis_nodes < 64:
            raise ValidationError(f"axis_nodes must be >= 64, got {self.axis_nodes}")


GL_ORDER = 16


@lru_cache(maxsize=None)
def gauss_legendre(order: int = GL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def composite_gl(a: float, b: float, panels: int, order: int = GL_ORDER):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    t, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def vertical_lines(family: BasisFamily, lo: float, hi: float) -> list[float]:
    """x-positions strictly inside (lo, hi) where D0 vanishes along a whole vertical line."""
    if family.kind is not Kind.FOURIER_COSINE:
        return []
    k0 = math.floor(lo / math.pi) + 1
    out = []
    k = k0
    while k * math.pi < hi:
        if k * math.pi > lo:
            out.append(k * math.pi)
        k += 1
    return out


def horizontal_lines(lo: float, hi: float) -> list[float]:
    return [0.0] if lo < 0 < hi else []


def _breaks(lo: float, hi: float, cuts: list[float]) -> list[float]:
    return [lo, *cuts, hi]


def _pairwise_sum(values: np.ndarray) -> complex:
    # np.sum uses a fixed pairwise tree for contiguous 1-D input
    return np.sum(np.ascontiguousarray(values))


def _check_side(family: BasisFamily, pts: np.ndarray, band: AxisBand) -> None:
    kb = kernels_at(family, pts)
    if np.any(kb.D0_rel < 10 * band.rel_threshold):
        raise ContourTooCloseToAxis(
            f"contour side passes within 10x the axis band (min D0/B0 = {float(np.min(kb.D0_rel)):.3g})"
        )


def contour_integral(
    family: BasisFamily,
    window: Window,
    spec: QuadratureSpec = QuadratureSpec(),
    band: AxisBand = DEFAULT_BAND,
) -> complex:
    """(1/2 pi i) times the counterclockwise integral of F around the window.

    The real part is the expected zero count; the imaginary part is residue
    that should vanish up to quadrature error.
    """
    xs = _breaks(window.xmin, window.xmax, vertical_lines(family, window.xmin, window.xmax))
    ys = _breaks(window.ymin, window.ymax, horizontal_lines(window.ymin, window.ymax))
    pieces = []
    # bottom and top sides, split where they cross vertical vanishing lines
    for y0, sign in ((window.ymin, 1.0), (window.ymax, -1.0)):
        for a, b in zip(xs[:-1], xs[1:]):
            t, w = composite_gl(a, b, spec.nodes_per_side)
            z = t + 1j * y0
            _check_side(family, z, band)
            pieces.append(sign * w * expectation(family, z, band))
    # right and left sides, split at the real axis
    for x0, sign in ((window.xmax, 1.0), (window.xmin, -1.0)):
        for a, b in zip(ys[:-1], ys[1:]):
            t, w = composite_gl(a, b, spec.nodes_per_side)
            z = x0 + 1j * t
            _check_side(family, z, band)
            pieces.append(sign * 1j * w * expectation(family, z, band))
    total = _pairwise_sum(np.concatenate(pieces))
    return complex(total / (2j * math.pi))


def expected_zeros_contour(
    family: BasisFamily,
    window: Window,
    spec: QuadratureSpec = QuadratureSpec(),
    band: AxisBand = DEFAULT_BAND,
) -> float:
    """Expected number of zeros in the window by the argument principle."""
    return contour_integral(family, window, spec, band).real


def _allocate(lengths: list[float], total: int) -> list[int]:
    """Split ``total`` cells over intervals proportionally, at least one each."""
    span = sum(lengths)
    counts = [max(1, round(total * L / span)) for L in lengths]
    return counts


def _displace(family: BasisFamily, z: np.ndarray, band: AxisBand) -> np.ndarray:
    """Push points lying in the axis band out to its edge, away from the nearest vanishing line."""
    z = z.copy()
    for _ in range(200):
        rel = kernels_at(family, z).D0_rel
        inside = rel < band.rel_threshold
        if not np.any(inside):
            return z
        zi = z[inside]
        scale = np.maximum(1.0, np.abs(zi))
        dy = zi.imag
        if family.kind is Kind.FOURIER_COSINE:
            dx = zi.real - np.pi * np.round(zi.real / np.pi)
            move_x = np.abs(dx) < np.abs(dy)
        else:
            dx = np.zeros_like(dy)
            move_x = np.zeros(dy.shape, dtype=bool)
        # grow the offset from the offending line geometrically until the band is cleared
        new_dy = np.where(dy == 0, band.rel_threshold * scale, 2.0 * dy)
        new_dx = np.where(dx == 0, band.rel_threshold * scale, 2.0 * dx)
        zi = np.where(move_x, (zi.real - dx + new_dx) + 1j * zi.imag, zi.real + 1j * (zi.imag - dy + new_dy))
        z[inside] = zi
    raise ContourTooCloseToAxis("could not move a point out of the axis band")


def h_on_points(family: BasisFamily, z: np.ndarray, band: AxisBand = DEFAULT_BAND) -> np.ndarray:
    """h at arbitrary points; points in the axis band are evaluated at the band edge."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=float)
    for s in range(0, flat.size, CHUNK):
        zz = flat[s:s + CHUNK]
        kb = kernels_at(family, zz)
        inside = band.contains(kb)
        if np.any(inside):
            zz = _displace(family, zz, band)
            kb = kernels_at(family, zz)
        out[s:s + CHUNK] = h_density(kb, band)
    return out.reshape(z.shape)


def _midpoints(a: float, b: float, k: int) -> tuple[np.ndarray, float]:
    step = (b - a) / k
    return a + step * (np.arange(k) + 0.5), step


def area_integral_h(
    family: BasisFamily,
    window: Window,
    spec: QuadratureSpec = QuadratureSpec(),
    band: AxisBand = DEFAULT_BAND,
) -> float:
    """Midpoint-rule integral of h over the window, cut along vanishing lines."""
    xs = _breaks(window.xmin, window.xmax, vertical_lines(family, window.xmin, window.xmax))
    ys = _breaks(window.ymin, window.ymax, horizontal_lines(window.ymin, window.ymax))
    nxs = _allocate(list(np.diff(xs)), spec.grid_nx)
    nys = _allocate(list(np.diff(ys)), spec.grid_ny)
    partial = []
    for (xa, xb), kx in zip(zip(xs[:-1], xs[1:]), nxs):
        mx, hx = _midpoints(xa, xb, kx)
        for (ya, yb), ky in zip(zip(ys[:-1], ys[1:]), nys):
            my, hy = _midpoints(ya, yb, ky)
            z = mx[:, None] + 1j * my[None, :]
            vals = h_on_points(family, z, band)
            partial.append(_pairwise_sum(vals.ravel()) * hx * hy)
    return float(math.fsum(partial))


def line_integral_g(
    family: BasisFamily, a: float, b: float, nodes: int = 256
) -> float:
    """Integral of the real-zero density over [a, b] by composite Gauss-Legendre."""
    panels = max(1, nodes // GL_ORDER)
    t, w = composite_gl(a, b, panels)
    return float(_pairwise_sum(w * real_intensity(family, t)))


def line_integral_g_imag(family: BasisFamily, a: float, b: float, nodes: int = 256) -> float:
    """Integral of the cosine family's imaginary-axis density over y in [a, b]."""
    panels = max(1, nodes // GL_ORDER)
    t, w = composite_gl(a, b, panels)
    return float(_pairwise_sum(w * g_density_imag_axis(family, t)))


def expected_zeros_area(
    family: BasisFamily,
    window: Window,
    spec: QuadratureSpec = QuadratureSpec(),
    band: AxisBand = DEFAULT_BAND,
) -> float:
    """Expected zeros in the window from the intensities.

    The area integral of h, plus the real-axis line integral of g when the
    window straddles the real axis, plus for the cosine family the line
    integrals along every vertical line x = k pi inside the window. A window
    whose edge lies exactly on a vanishing line gets no line contribution.
    """
    total = [area_integral_h(family, window, spec, band)]
    if window.straddles_real_axis:
        total.append(line_integral_g(family, window.xmin, window.xmax, spec.axis_nodes))
    for _ in vertical_lines(family, window.xmin, window.xmax):
        # every line x = k pi carries the same density: cos(j(z + k pi)) = (-1)^(jk) cos(jz)
        total.append(line_integral_g_imag(family, window.ymin, window.ymax, spec.axis_nodes))
    return float(math.fsum(total))


def expected_real_zeros(
    family: BasisFamily, half_width: float = 50.0, nodes: int = 4096, tail: bool = True
) -> float:
    """Expected number of real zeros: quadrature on [-L, L] plus a Cauchy tail.

    The tail assumes g(x) ~ c / (1 + x^2) beyond L, with c fitted from g at
    +/-L. That is exact for the root-binomial family and the right decay for
    every polynomial family; it is meaningless for the trigonometric families,
    whose real zeros do not thin out.
    """
    L = float(half_width)
    inner = line_integral_g(family, -L, L, nodes)
    if not tail:
        return inner
    gL = real_intensity(family, np.array([-L, L]))
    c = gL * (1.0 + L * L)
    tail_each = math.pi / 2 - math.atan(L)
    return inner + float(c[0] + c[1]) * tail_each
