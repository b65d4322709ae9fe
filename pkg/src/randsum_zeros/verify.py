"""Independent oracles for the closed-form densities.

* ``f_via_cholesky`` builds F from an explicit Cholesky factor of the
  covariance of (Re P, Im P, Re P', Im P') and shares no formula code with
  :mod:`density`.
* ``wirtinger_fd`` differentiates the closed form of F numerically, so that
  pi h = dF/dzbar can be checked pointwise.
* ``conjugate_partials`` treats z and zbar as independent variables and
  checks the partial derivatives of the kernel sums in zbar.
* ``h_via_qr`` is a second route to h through a QR factorization of the
  same four real vectors.

The sweep functions at the bottom bundle these into the checks run by the
``verify`` subcommand. ``density`` is looked up through the module object
on every call, so a patched formula is what gets tested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import density as _density
from . import quadrature as _quadrature
from .basis import FAMILY_NAMES, BasisFamily, EvalVector, Kind, evaluate_basis
from .errors import SingularPivot
from .kernels import e1_real

PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class GaussianQuad:
    """The four real coefficient vectors at a point and their covariance factor.

    Vectors are divided by ``scale`` (the largest |f_j|); F is unchanged.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    cov: np.ndarray
    L: np.ndarray
    scale: float


def cholesky4(cov: np.ndarray, tol: float) -> np.ndarray:
    """Lower Cholesky factor of a 4x4 PSD matrix; pivots at or below ``tol`` become 0."""
    L = np.zeros((4, 4))
    for j in range(4):
        piv = cov[j, j] - math.fsum(L[j, k] ** 2 for k in range(j))
        if piv <= tol:
            continue
        L[j, j] = math.sqrt(piv)
        for i in range(j + 1, 4):
            L[i, j] = (cov[i, j] - math.fsum(L[i, k] * L[j, k] for k in range(j))) / L[j, j]
    return L


def build_gaussian_quad(ev: EvalVector) -> GaussianQuad:
    """Covariance of (Re P, Im P, Re P', Im P') and its Cholesky factor at one point.

    On the real axis b = 0, so l22 comes out 0; :func:`f_via_cholesky`
    rejects such factors.
    """
    v = np.asarray(ev.values, dtype=complex).ravel()
    dv = np.asarray(ev.derivs, dtype=complex).ravel()
    scale = float(np.max(np.abs(v)))
    if scale == 0:
        scale = 1.0
    a, b, c, d = v.real / scale, v.imag / scale, dv.real / scale, dv.imag / scale
    M = np.stack([a, b, c, d])
    cov = M @ M.T
    L = cholesky4(cov, PIVOT_RTOL * float(np.trace(cov)))
    return GaussianQuad(a, b, c, d, cov, L, scale)


def f_via_cholesky(gq: GaussianQuad) -> complex:
    """F = (l32 - l41 + i(l31 + l42)) / (-l21 + i(l11 + l22)), indices 1-based.

    Raises
    ------
    SingularPivot
        If l11 or l22 is zero (the point is on the vanishing set).
    """
    L = gq.L
    if L[0, 0] == 0 or L[1, 1] == 0:
        raise SingularPivot("l11 or l22 vanished; F has no finite value at this point")
    num = complex(L[2, 1] - L[3, 0], L[2, 0] + L[3, 1])
    den = complex(-L[1, 0], L[0, 0] + L[1, 1])
    return num / den


def _F(family: BasisFamily, z: complex) -> complex:
    return complex(_density.f_expectation(_density.kernels_at(family, z)))


def default_step(z: complex) -> float:
    return 1e-5 * max(1.0, abs(z))


def wirtinger_fd(family: BasisFamily, z: complex, step: float | None = None) -> complex:
    """dF/dzbar = (dF/dx + i dF/dy) / 2 by central differences."""
    s = default_step(z) if step is None else float(step)
    fx = (_F(family, z + s) - _F(family, z - s)) / (2 * s)
    fy = (_F(family, z + 1j * s) - _F(family, z - 1j * s)) / (2 * s)
    return 0.5 * (fx + 1j * fy)


def pi_h(family: BasisFamily, z: complex) -> float:
    return math.pi * float(_density.h_density(_density.kernels_at(family, z)))


def wirtinger_check(family: BasisFamily, z: complex, step: float | None = None) -> dict:
    """Relative gap between pi h and the finite-difference dF/dzbar, plus the residual imaginary part."""
    fd = wirtinger_fd(family, z, step)
    ref = pi_h(family, z)
    # a scale for the degree-1 case, where h is 0
    kb = _density.kernels_at(family, z)
    scale = max(abs(ref), float(np.real(kb.B2) / np.real(kb.B0)))
    return {"fd": fd, "pi_h": ref, "rel_err": abs(fd - ref) / scale}


def h_via_qr(ev: EvalVector) -> float:
    """h from R of the QR factorization of the columns (a, b, c, d).

    h = (r33^2 + r34^2 + r44^2) / (2 pi r11 r22).
    """
    v = np.asarray(ev.values, dtype=complex).ravel()
    dv = np.asarray(ev.derivs, dtype=complex).ravel()
    s = float(np.max(np.abs(v)))
    M = np.stack([v.real, v.imag, dv.real, dv.imag], axis=1) / s
    R = np.zeros((4, 4))
    r = np.linalg.qr(M, mode="r")
    R[: r.shape[0], :] = r
    return float((R[2, 2] ** 2 + R[2, 3] ** 2 + R[3, 3] ** 2) / (2 * math.pi * abs(R[0, 0] * R[1, 1])))


# -- z and zbar as independent variables


def _sums(family: BasisFamily, u: complex, v: complex) -> dict:
    fu = evaluate_basis(family, u)
    fv = evaluate_basis(family, v)
    pu, du = fu.values, fu.derivs
    pv, dv = fv.values, fv.derivs
    A0 = np.sum(pu * pu)
    A0b = np.sum(pv * pv)
    B0 = np.sum(pu * pv)
    return {
        "A0": A0,
        "A0bar": A0b,
        "B0": B0,
        "A1bar": np.sum(pv * dv),
        "B1": np.sum(pv * du),
        "B1bar": np.sum(pu * dv),
        "B2": np.sum(du * dv),
        "D0": np.sqrt(B0 * B0 - A0 * A0b),
        # magnitudes of the summands, the natural scale of each partial
        "abs_B1bar": np.sum(np.abs(pu * dv)),
        "abs_A1bar": np.sum(np.abs(pv * dv)),
        "abs_B2": np.sum(np.abs(du * dv)),
    }


def conjugate_partials(family: BasisFamily, z: complex, step: float | None = None) -> dict:
    """Relative errors of the zbar-partials of B0, conj(A0), B1 and D0.

    With u = z held fixed and v = zbar varied, the expected partials are
    conj(B1), 2 conj(A1), B2 and (B0 conj(B1) - A0 conj(A1)) / D0. Errors
    are relative to the larger of |expected| and the sum of the summand
    magnitudes, since conj(A1) vanishes identically for the sine/cosine
    family.
    """
    s = default_step(z) if step is None else float(step)
    u, v = z, np.conj(z)
    k0 = _sums(family, u, v)
    kp = _sums(family, u, v + s)
    km = _sums(family, u, v - s)

    def fd(name):
        return (kp[name] - km[name]) / (2 * s)

    expect = {
        "B0": k0["B1bar"],
        "A0bar": 2 * k0["A1bar"],
        "B1": k0["B2"],
        "D0": (k0["B0"] * k0["B1bar"] - k0["A0"] * k0["A1bar"]) / k0["D0"],
    }
    natural = {
        "B0": k0["abs_B1bar"],
        "A0bar": 2 * k0["abs_A1bar"],
        "B1": k0["abs_B2"],
        "D0": (abs(k0["B0"]) * k0["abs_B1bar"] + abs(k0["A0"]) * k0["abs_A1bar"]) / abs(k0["D0"]),
    }
    out = {}
    for name, ref in expect.items():
        scale = max(abs(ref), natural[name], 1e-300)
        out[name] = float(abs(fd(name) - ref) / scale)
    return out


# -- sweeps


def random_off_axis_points(family: BasisFamily, count: int, rng: np.random.Generator,
                           min_rel: float = 1e-3, radius: float = 2.0) -> np.ndarray:
    """Points with |x| <= radius, 0.05 <= |y| <= 1.5 and D0/B0 above ``min_rel``."""
    out = []
    while len(out) < count:
        x = rng.uniform(-radius, radius)
        y = rng.uniform(0.05, 1.5) * rng.choice([-1.0, 1.0])
        z = complex(x, y)
        kb = _density.kernels_at(family, z)
        if float(kb.D0_rel) > min_rel:
            out.append(z)
    return np.array(out)


def _families(max_n: int, rng: np.random.Generator, count: int):
    names = list(FAMILY_NAMES)
    for i in range(count):
        kind = Kind(names[i % len(names)])
        n = int(rng.integers(1, max_n + 1))
        if kind is Kind.FOURIER_MIXED and n % 2:
            n += 1 if n < max_n else -1
        yield BasisFamily(kind, n)


def cholesky_sweep(count: int = 200, max_n: int = 15, seed: int = 0) -> dict:
    """Max relative gap between the closed-form F and the Cholesky F."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for fam in _families(max_n, rng, count):
        z = random_off_axis_points(fam, 1, rng)[0]
        ev = evaluate_basis(fam, z)
        f_chol = f_via_cholesky(build_gaussian_quad(ev))
        f_cf = complex(_density.f_expectation(_density.kernels_at(fam, z)))
        worst = max(worst, abs(f_chol - f_cf) / abs(f_cf))
    return {"points": count, "max_rel_dev": worst}


def wirtinger_sweep(points_per_family: int = 100, n: int = 10, seed: int = 1,
                    order_step: float = 0.05) -> dict:
    """pi h against dF/dzbar for every family, and the stencil's convergence order.

    The order is measured on steps ``order_step * |y|`` and half of that,
    large enough that truncation error dominates roundoff.
    """
    rng = np.random.default_rng(seed)
    out = {}
    for name in FAMILY_NAMES:
        fam = BasisFamily.from_name(name, n)
        pts = random_off_axis_points(fam, points_per_family, rng)
        errs, ratios = [], []
        for z in pts:
            errs.append(wirtinger_check(fam, z)["rel_err"])
            s = order_step * abs(z.imag)
            e1 = wirtinger_check(fam, z, s)["rel_err"]
            e2 = wirtinger_check(fam, z, s / 2)["rel_err"]
            if e2 > 0:
                ratios.append(e1 / e2)
        out[name] = {
            "max_rel_err": float(max(errs)),
            "median_order_ratio": float(np.median(ratios)) if ratios else float("nan"),
        }
    return out


def partials_sweep(points_per_family: int = 20, n: int = 10, seed: int = 2) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for name in FAMILY_NAMES:
        fam = BasisFamily.from_name(name, n)
        worst: dict[str, float] = {}
        for z in random_off_axis_points(fam, points_per_family, rng):
            for key, val in conjugate_partials(fam, z).items():
                worst[key] = max(worst.get(key, 0.0), val)
        out[name] = worst
    return out


def jump_extrapolation(family: BasisFamily, a: float, eps=(1e-2, 1e-3, 1e-4)) -> dict:
    """Extrapolate F(a + i eps) and F(a - i eps) to eps = 0 and compare with the jump limits.

    Also reports the distance to the variant carrying an extra sgn(a)
    factor on E1, which the numbers reject for a < 0.
    """
    eps = np.asarray(eps, dtype=float)
    kb = _density.kernels_at(family, complex(a, 0.0))
    upper, lower = _density.f_jump_limits(kb)
    scale = max(1.0, abs(complex(upper)))

    def extrapolate(sign):
        vals = np.array([_F(family, complex(a, sign * e)) for e in eps])
        # quadratic through the three samples, evaluated at 0 (Lagrange)
        total = 0j
        for i in range(eps.size):
            w = 1.0
            for j in range(eps.size):
                if j != i:
                    w *= (0 - eps[j]) / (eps[i] - eps[j])
            total += w * vals[i]
        return total, vals

    up, up_vals = extrapolate(1.0)
    lo, lo_vals = extrapolate(-1.0)
    B0 = float(np.real(kb.B0))
    E1 = float(e1_real(kb))
    variant_up = (complex(kb.B1) - 1j * E1 * math.copysign(1.0, a)) / B0
    return {
        "a": a,
        "err_upper": abs(up - complex(upper)) / scale,
        "err_lower": abs(lo - complex(lower)) / scale,
        "raw_gap_upper": [abs(v - complex(upper)) / scale for v in up_vals],
        "sgn_variant_err_upper": abs(up - variant_up) / scale,
    }


def jump_sweep(points_per_family: int = 50, n: int = 10, seed: int = 3, half_width: float = 2.0) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for name in FAMILY_NAMES:
        fam = BasisFamily.from_name(name, n)
        xs = rng.uniform(-half_width, half_width, points_per_family)
        # force both signs of a to appear
        xs[: points_per_family // 2] = -np.abs(xs[: points_per_family // 2])
        xs[points_per_family // 2:] = np.abs(xs[points_per_family // 2:])
        res = [jump_extrapolation(fam, float(a)) for a in xs]
        neg = [r for r in res if r["a"] < 0]
        out[name] = {
            "max_err": max(max(r["err_upper"], r["err_lower"]) for r in res),
            "min_sgn_variant_err_negative_a": min((r["sgn_variant_err_upper"] for r in neg), default=float("nan")),
        }
    return out


def random_rectangle(family: BasisFamily, rng: np.random.Generator) -> _quadrature.Window:
    """A rectangle in the upper half plane, clear of the real axis."""
    x0 = rng.uniform(-2.0, 1.0)
    y0 = rng.uniform(0.05, 1.0)
    return _quadrature.Window(x0, x0 + rng.uniform(0.2, 1.0), y0, y0 + rng.uniform(0.2, 1.0))


def stokes_sweep(rectangles_per_family: int = 20, n: int = 10, seed: int = 4,
                 spec: _quadrature.QuadratureSpec = _quadrature.QuadratureSpec()) -> dict:
    """Contour count against area count on random off-axis rectangles."""
    rng = np.random.default_rng(seed)
    out = {}
    for name in FAMILY_NAMES:
        fam = BasisFamily.from_name(name, n)
        worst = 0.0
        for _ in range(rectangles_per_family):
            w = random_rectangle(fam, rng)
            c = _quadrature.expected_zeros_contour(fam, w, spec)
            a = _quadrature.expected_zeros_area(fam, w, spec)
            worst = max(worst, abs(c - a) / max(1e-4, 1e-3 * abs(a)))
        out[name] = {"max_gap_over_tolerance": worst}
    return out
