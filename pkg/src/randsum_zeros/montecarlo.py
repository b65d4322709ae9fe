"""Monte Carlo sampling of random sums and empirical root histograms.

Trials are grouped in fixed blocks of ``BLOCK`` consecutive trials. Block
``b`` draws its coefficients from a Philox stream whose counter starts at
``b``, so the coefficients of trial ``t`` depend only on ``(seed, t)``.
Blocks may run on worker threads; their partial histograms are merged in
block order, which keeps every output identical for any thread count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .basis import BasisFamily, Kind, evaluate_basis, prefactors
from .density import DEFAULT_BAND, AxisBand, g_density_imag_axis, real_intensity
from .errors import TooFewTrials, UnstableFamily, ValidationError
from .quadrature import GL_ORDER, Window, gauss_legendre, h_on_points
from .roots import aberth_batch, effective_degree, roots_polynomial

BLOCK = 1024
# share of discarded trials above which the run is rejected
MAX_NONCONVERGED = 1e-3
_U64 = 1 << 64


@dataclass(frozen=True)
class TrialConfig:
    """Everything that determines a Monte Carlo run.

    ``nx`` by ``ny`` histogram cells cover the window; ``axis_bins`` cells
    cover [xmin, xmax] for real roots and, for the cosine family,
    [ymin, ymax] for roots on the lines x = k pi.
    """

    family: BasisFamily
    trials: int
    seed: int
    window: Window
    real_tol: float = 1e-8
    nx: int = 64
    ny: int = 64
    axis_bins: int = 64
    keep_roots: bool = False

    def __post_init__(self):
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < _U64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (math.isfinite(self.real_tol) and self.real_tol > 0):
            raise ValidationError(f"real_tol must be positive, got {self.real_tol}")
        for name in ("nx", "ny", "axis_bins"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass(frozen=True)
class RootHistogram:
    """Binned roots of a completed run.

    ``grid[i, k]`` counts complex roots with x in column i and y in row k.
    Off-grid roots are tallied, never dropped, so that
    ``grid.sum() + imag_bins.sum() + out_of_window == total_roots - total_real_roots``
    and ``axis_bins.sum() + real_out_of_window == total_real_roots``.
    """

    family: BasisFamily
    window: Window
    grid: np.ndarray
    axis_bins: np.ndarray
    imag_bins: np.ndarray
    imag_lines: int
    total_roots: int
    total_real_roots: int
    total_imag_roots: int
    out_of_window: int
    real_out_of_window: int
    trials_completed: int
    nonconverged: int
    real_counts: np.ndarray
    roots: Optional[np.ndarray] = None
    root_trials: Optional[np.ndarray] = None

    @property
    def mean_real_roots(self) -> float:
        return float(np.mean(self.real_counts)) if self.real_counts.size else float("nan")

    @property
    def std_real_roots(self) -> float:
        return float(np.std(self.real_counts, ddof=1)) if self.real_counts.size > 1 else float("nan")

    def summary(self) -> dict:
        return {
            "family": self.family.name,
            "n": self.family.n,
            "window": self.window.as_dict(),
            "trials_completed": self.trials_completed,
            "nonconverged": self.nonconverged,
            "total_roots": self.total_roots,
            "total_real_roots": self.total_real_roots,
            "total_imag_roots": self.total_imag_roots,
            "out_of_window": self.out_of_window,
            "real_out_of_window": self.real_out_of_window,
            "mean_real_roots": self.mean_real_roots,
            "std_real_roots": self.std_real_roots,
        }


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Generator for trial block ``block``; independent of how blocks are scheduled."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(block), 0]))


def sample_coefficients(n: int, rng: np.random.Generator) -> np.ndarray:
    """n + 1 iid standard normal coefficients."""
    return rng.standard_normal(n + 1)


def trial_coefficients(seed: int, n: int, first: int, count: int) -> np.ndarray:
    """Coefficients of trials ``first .. first + count - 1`` as a (count, n + 1) array."""
    out = np.empty((count, n + 1))
    t = first
    while t < first + count:
        b, r = divmod(t, BLOCK)
        rows = min(BLOCK, r + first + count - t)
        draws = block_generator(seed, b).standard_normal((rows, n + 1))
        take = rows - r
        out[t - first:t - first + take] = draws[r:]
        t += take
    return out


# -- root finding


def _solve_batch(coeffs: np.ndarray, drop_origin: bool):
    """Roots of each row. Returns (roots, owner row, converged per row)."""
    batch, width = coeffs.shape
    mag = np.abs(coeffs)
    big = mag.max(axis=1)
    regular = (mag[:, -1] >= 1e-30 * big) & (mag[:, 0] > 0)
    roots, owner = [], []
    conv = np.ones(batch, dtype=bool)
    idx = np.nonzero(regular)[0]
    if idx.size:
        r, ok = aberth_batch(coeffs[idx])
        conv[idx] = ok
        roots.append(r.ravel())
        owner.append(np.repeat(idx, r.shape[1]))
    for i in np.nonzero(~regular)[0]:
        if big[i] == 0 or effective_degree(coeffs[i]) == 0:
            continue
        r = roots_polynomial(coeffs[i])
        if drop_origin:
            r = r[r != 0]
        roots.append(r)
        owner.append(np.full(r.size, i))
    if not roots:
        return np.empty(0, complex), np.empty(0, int), conv
    roots = np.concatenate(roots)
    owner = np.concatenate(owner)
    order = np.argsort(owner, kind="stable")
    return roots[order], owner[order], conv


def trig_polynomial(family: BasisFamily, eta: np.ndarray) -> np.ndarray:
    """Coefficients of Q(w), ascending, with sum_j eta_j f_j(z) = w^-m Q(w) and w = e^{iz}.

    ``eta`` may be (n + 1,) or (batch, n + 1).
    """
    eta = np.asarray(eta, dtype=float)
    single = eta.ndim == 1
    eta = np.atleast_2d(eta)
    n = family.n
    if family.kind is Kind.FOURIER_COSINE:
        m = n
        q = np.zeros((eta.shape[0], 2 * m + 1), dtype=complex)
        q[:, m] = eta[:, 0]
        q[:, m + 1:] += 0.5 * eta[:, 1:]
        q[:, m - 1::-1] += 0.5 * eta[:, 1:]
    elif family.kind is Kind.FOURIER_MIXED:
        m = n // 2
        q = np.zeros((eta.shape[0], 2 * m + 1), dtype=complex)
        q[:, m] = eta[:, 0]
        cos_k = eta[:, 2::2]
        sin_k = eta[:, 1::2]
        q[:, m + 1:] = 0.5 * (cos_k - 1j * sin_k)
        q[:, m - 1::-1] = 0.5 * (cos_k + 1j * sin_k)
    else:
        raise ValidationError(f"{family.name} is not a trigonometric family")
    return q[0] if single else q


def _strip_roots(w: np.ndarray) -> np.ndarray:
    # z = -i Log w, so Re z = arg w in (-pi, pi] and Im z = -ln|w|
    return np.angle(w) - 1j * np.log(np.abs(w))


def _tile(z0: np.ndarray, xmin: float, xmax: float):
    """Copies z0 + 2 pi k with real part in [xmin, xmax); returns (copies, index into z0)."""
    two_pi = 2 * math.pi
    x0 = z0.real
    kmin = np.ceil((xmin - x0) / two_pi)
    kmax = np.ceil((xmax - x0) / two_pi) - 1
    # guard the rounding of the divisions against the half-open bounds
    kmin = np.where(x0 + two_pi * (kmin - 1) >= xmin, kmin - 1, kmin)
    kmin = np.where(x0 + two_pi * kmin < xmin, kmin + 1, kmin)
    kmax = np.where(x0 + two_pi * (kmax + 1) < xmax, kmax + 1, kmax)
    kmax = np.where(x0 + two_pi * kmax >= xmax, kmax - 1, kmax)
    reps = np.maximum(kmax - kmin + 1, 0).astype(int)
    src = np.repeat(np.arange(z0.size), reps)
    start = np.repeat(np.cumsum(reps) - reps, reps)
    k = kmin[src] + (np.arange(src.size) - start)
    return z0[src] + two_pi * k, src


def roots_trig(family: BasisFamily, coeffs, window: Optional[Window] = None) -> np.ndarray:
    """Zeros of sum_j coeffs_j f_j(z) for the two trigonometric families.

    Without a window the zeros in the fundamental strip -pi < Re z <= pi are
    returned. With a window they are translated by multiples of 2 pi to
    cover [xmin, xmax) and those with Im z outside [ymin, ymax) are dropped.
    """
    q = trig_polynomial(family, coeffs)
    if effective_degree(q) == 0:
        return np.empty(0, dtype=complex)
    w = roots_polynomial(q)
    z0 = _strip_roots(w[w != 0])
    if window is None:
        return z0
    z, _ = _tile(z0, window.xmin, window.xmax)
    keep = (z.imag >= window.ymin) & (z.imag < window.ymax)
    return z[keep]


def imag_lines(family: BasisFamily, xmin: float, xmax: float) -> list[float]:
    """Lines x = k pi in [xmin, xmax) that carry roots of the cosine family."""
    if family.kind is not Kind.FOURIER_COSINE:
        return []
    k = math.ceil(xmin / math.pi)
    out = []
    while k * math.pi < xmax:
        if k * math.pi >= xmin:
            out.append(k * math.pi)
        k += 1
    return out


# -- one block of trials


def _bin(v: np.ndarray, lo: float, hi: float, bins: int):
    idx = np.floor((v - lo) / (hi - lo) * bins).astype(np.int64)
    inside = (v >= lo) & (v < hi) & (idx >= 0) & (idx < bins)
    return np.minimum(idx, bins - 1), inside


def _run_block(cfg: TrialConfig, block: int) -> RootHistogram:
    fam, win = cfg.family, cfg.window
    first = block * BLOCK
    count = min(BLOCK, cfg.trials - first)
    eta = block_generator(cfg.seed, block).standard_normal((count, fam.n + 1))
    lines = imag_lines(fam, win.xmin, win.xmax)
    if fam.kind.is_polynomial:
        roots, owner, conv = _solve_batch(eta * prefactors(fam.kind, fam.n), drop_origin=False)
        is_real = np.abs(roots.imag) < cfg.real_tol * np.maximum(1.0, np.abs(roots))
        is_imag = np.zeros(roots.shape, dtype=bool)
    else:
        w, owner, conv = _solve_batch(trig_polynomial(fam, eta), drop_origin=True)
        z0 = _strip_roots(w)
        scale = cfg.real_tol * np.maximum(1.0, np.abs(z0))
        is_real = np.abs(z0.imag) < scale
        is_imag = np.zeros(z0.shape, dtype=bool)
        if fam.kind is Kind.FOURIER_COSINE:
            on_pi = np.abs(np.abs(z0.real) - math.pi) < scale
            is_imag = ~is_real & ((np.abs(z0.real) < scale) | on_pi)
            # snap to the line exactly so that tiling decides membership unambiguously
            z0 = np.where(is_imag, np.where(on_pi, math.pi, 0.0) + 1j * z0.imag, z0)
        roots, src = _tile(z0, win.xmin, win.xmax)
        owner, is_real, is_imag = owner[src], is_real[src], is_imag[src]
    # discard non-converged trials whole
    keep = conv[owner]
    roots, owner, is_real, is_imag = roots[keep], owner[keep], is_real[keep], is_imag[keep]
    done = int(np.count_nonzero(conv))

    grid = np.zeros((cfg.nx, cfg.ny), dtype=np.int64)
    axis = np.zeros(cfg.axis_bins, dtype=np.int64)
    imag = np.zeros(cfg.axis_bins if lines else 0, dtype=np.int64)

    cplx = ~is_real & ~is_imag
    zc = roots[cplx]
    ix, okx = _bin(zc.real, win.xmin, win.xmax, cfg.nx)
    iy, oky = _bin(zc.imag, win.ymin, win.ymax, cfg.ny)
    ok = okx & oky
    np.add.at(grid, (ix[ok], iy[ok]), 1)
    out = int(np.count_nonzero(~ok))

    zi = roots[is_imag]
    if zi.size:
        iy, oky = _bin(zi.imag, win.ymin, win.ymax, cfg.axis_bins)
        np.add.at(imag, iy[oky], 1)
        out += int(np.count_nonzero(~oky))

    zr = roots[is_real]
    if win.straddles_real_axis:
        ia, oka = _bin(zr.real, win.xmin, win.xmax, cfg.axis_bins)
        np.add.at(axis, ia[oka], 1)
        real_out = int(np.count_nonzero(~oka))
    else:
        real_out = zr.size

    per_trial = np.bincount(owner[is_real], minlength=count)[conv]
    return RootHistogram(
        family=fam,
        window=win,
        grid=grid,
        axis_bins=axis,
        imag_bins=imag,
        imag_lines=len(lines),
        total_roots=int(roots.size),
        total_real_roots=int(zr.size),
        total_imag_roots=int(zi.size),
        out_of_window=out,
        real_out_of_window=real_out,
        trials_completed=done,
        nonconverged=count - done,
        real_counts=per_trial.astype(np.int64),
        roots=roots if cfg.keep_roots else None,
        root_trials=(owner + first).astype(np.int64) if cfg.keep_roots else None,
    )


def merge(parts: list[RootHistogram]) -> RootHistogram:
    """Combine block histograms in the given order."""
    head = parts[0]
    keep = head.roots is not None
    return RootHistogram(
        family=head.family,
        window=head.window,
        grid=np.sum([p.grid for p in parts], axis=0),
        axis_bins=np.sum([p.axis_bins for p in parts], axis=0),
        imag_bins=np.sum([p.imag_bins for p in parts], axis=0),
        imag_lines=head.imag_lines,
        total_roots=sum(p.total_roots for p in parts),
        total_real_roots=sum(p.total_real_roots for p in parts),
        total_imag_roots=sum(p.total_imag_roots for p in parts),
        out_of_window=sum(p.out_of_window for p in parts),
        real_out_of_window=sum(p.real_out_of_window for p in parts),
        trials_completed=sum(p.trials_completed for p in parts),
        nonconverged=sum(p.nonconverged for p in parts),
        real_counts=np.concatenate([p.real_counts for p in parts]),
        roots=np.concatenate([p.roots for p in parts]) if keep else None,
        root_trials=np.concatenate([p.root_trials for p in parts]) if keep else None,
    )


def thread_count() -> int:
    """Worker threads from RANDSUM_THREADS (unset or 0 means one per CPU)."""
    raw = os.environ.get("RANDSUM_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        raise ValidationError(f"RANDSUM_THREADS must be a non-negative integer, got {raw!r}") from None
    if k < 0:
        raise ValidationError(f"RANDSUM_THREADS must be a non-negative integer, got {k}")
    return k or (os.cpu_count() or 1)


def run_trials(cfg: TrialConfig, threads: Optional[int] = None) -> RootHistogram:
    """Sample ``cfg.trials`` random sums and histogram their roots.

    Raises
    ------
    UnstableFamily
        If more than 0.1% of the trials fail to converge.
    """
    blocks = range(math.ceil(cfg.trials / BLOCK))
    workers = thread_count() if threads is None else max(1, int(threads))
    if workers == 1 or len(blocks) == 1:
        parts = [_run_block(cfg, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(cfg, b), blocks))
    hist = merge(parts)
    if hist.nonconverged > MAX_NONCONVERGED * cfg.trials:
        raise UnstableFamily(
            f"{hist.nonconverged} of {cfg.trials} trials did not converge for {cfg.family}"
        )
    return hist


def residual_ratio(family: BasisFamily, coeffs, z) -> np.ndarray:
    """|sum eta_j f_j(z)| / sum |eta_j| |f_j(z)| at each root."""
    ev = evaluate_basis(family, np.asarray(z, dtype=complex))
    c = np.asarray(coeffs, dtype=float)
    num = np.abs(ev.values @ c)
    den = np.abs(ev.values) @ np.abs(c)
    return num / den


# -- comparison with the intensities


@dataclass(frozen=True)
class BinComparison:
    """Standardized residuals (observed - expected) / sqrt(expected) over qualifying bins."""

    name: str
    qualifying: int
    outside_3sigma: int
    max_abs_residual: float
    threshold: float

    @property
    def fraction_within(self) -> float:
        return 1.0 - self.outside_3sigma / self.qualifying if self.qualifying else float("nan")

    @property
    def passed(self) -> bool:
        return self.qualifying == 0 or self.fraction_within > self.threshold

    def as_dict(self) -> dict:
        return {
            "qualifying": self.qualifying,
            "outside_3sigma": self.outside_3sigma,
            "fraction_within_3sigma": self.fraction_within,
            "max_abs_residual": self.max_abs_residual,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ComparisonReport:
    family: str
    n: int
    trials: int
    parts: tuple[BinComparison, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.parts)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "trials": self.trials,
            "passed": self.passed,
            **{p.name: p.as_dict() for p in self.parts},
        }


def _compare(name: str, observed: np.ndarray, expected: np.ndarray, min_expected: float, threshold: float):
    q = expected >= min_expected
    if not np.any(q):
        return BinComparison(name, 0, 0, float("nan"), threshold)
    r = (observed[q] - expected[q]) / np.sqrt(expected[q])
    return BinComparison(name, int(q.sum()), int(np.count_nonzero(np.abs(r) > 3)), float(np.max(np.abs(r))), threshold)


def _cell_rule(lo: float, hi: float, cells: int, order: int):
    t, w = gauss_legendre(order)
    edges = np.linspace(lo, hi, cells + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return mid[:, None] + half[:, None] * t, half[:, None] * w


def expected_grid(family: BasisFamily, window: Window, nx: int, ny: int,
                  order: int = 6, band: AxisBand = DEFAULT_BAND) -> np.ndarray:
    """Integral of h over each histogram cell, by an order x order Gauss rule per cell."""
    xn, xw = _cell_rule(window.xmin, window.xmax, nx, order)
    yn, yw = _cell_rule(window.ymin, window.ymax, ny, order)
    z = xn[:, None, :, None] + 1j * yn[None, :, None, :]
    h = h_on_points(family, z, band)
    return np.einsum("ikab,ia,kb->ik", h, xw, yw)


def expected_axis(family: BasisFamily, lo: float, hi: float, bins: int, order: int = GL_ORDER) -> np.ndarray:
    """Integral of the real-zero density over each axis bin."""
    xn, xw = _cell_rule(lo, hi, bins, order)
    return np.sum(real_intensity(family, xn) * xw, axis=1)


def expected_imag(family: BasisFamily, lo: float, hi: float, bins: int, order: int = GL_ORDER) -> np.ndarray:
    """Integral of the cosine family's imaginary-axis density over each bin."""
    yn, yw = _cell_rule(lo, hi, bins, order)
    return np.sum(g_density_imag_axis(family, yn) * yw, axis=1)


def compare_histogram(
    hist: RootHistogram,
    family: Optional[BasisFamily] = None,
    min_expected: float = 20.0,
    threshold: float = 0.985,
    band: AxisBand = DEFAULT_BAND,
) -> ComparisonReport:
    """Test a histogram against the intensities of ``family`` (default: its own).

    A bin qualifies when its expected count is at least ``min_expected``;
    each part passes when more than ``threshold`` of its qualifying bins lie
    within three standard deviations.

    Raises
    ------
    TooFewTrials
        If no bin qualifies.
    """
    fam = hist.family if family is None else family
    win, trials = hist.window, hist.trials_completed
    if trials == 0:
        raise TooFewTrials("the histogram holds no completed trials")
    nx, ny = hist.grid.shape
    parts = [_compare("grid", hist.grid, trials * expected_grid(fam, win, nx, ny, band=band), min_expected, threshold)]
    if win.straddles_real_axis:
        exp_axis = trials * expected_axis(fam, win.xmin, win.xmax, hist.axis_bins.size)
        parts.append(_compare("axis", hist.axis_bins, exp_axis, min_expected, threshold))
    if hist.imag_bins.size:
        exp_imag = trials * hist.imag_lines * expected_imag(fam, win.ymin, win.ymax, hist.imag_bins.size)
        parts.append(_compare("imag_axis", hist.imag_bins, exp_imag, min_expected, threshold))
    if not any(p.qualifying for p in parts):
        raise TooFewTrials(f"no bin reaches an expected count of {min_expected:g}; run more trials")
    return ComparisonReport(fam.name, fam.n, trials, tuple(parts))
