"""Aberth-Ehrlich simultaneous root iteration, vectorised over many polynomials."""
from __future__ import annotations

import math

import numpy as np

from .errors import NoConvergence

MAX_SWEEPS = 200
STEP_TOL = 1e-13
# a root whose residual is this many roundoff units of the Horner sum is as good as it gets
_RESIDUAL_ULPS = 8.0
_EPS = np.finfo(float).eps
# bound on batch * degree**2 complex entries held at once by the pairwise term
_PAIR_BUDGET = 1 << 21


def horner(coeffs: np.ndarray, z: np.ndarray):
    """p(z), p'(z) and sum_j |c_j| |z|^j for coefficients in ascending order.

    ``coeffs`` has shape (batch, deg + 1); ``z`` has shape (batch, k).
    """
    deg = coeffs.shape[-1] - 1
    c = coeffs[:, :, None]
    p = np.broadcast_to(c[:, deg], z.shape).astype(complex)
    dp = np.zeros_like(p)
    az = np.abs(z)
    bound = np.broadcast_to(np.abs(c[:, deg]), z.shape).astype(float)
    for j in range(deg - 1, -1, -1):
        dp = dp * z + p
        p = p * z + c[:, j]
        bound = bound * az + np.abs(c[:, j])
    return p, dp, bound


def newton_ratio(coeffs: np.ndarray, z: np.ndarray):
    """p(z)/p'(z) and a flag for residuals at roundoff level.

    Outside the unit disc the reversed polynomial q(w) = w^deg p(1/w) is used,
    p/p' = z / (deg - w q'(w)/q(w)) with w = 1/z, so large iterates never
    overflow.
    """
    deg = coeffs.shape[-1] - 1
    outside = np.abs(z) > 1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zi = np.where(outside, 0.0, z)
        wo = np.where(outside, 1.0 / z, 0.0)
        p, dp, bound = horner(coeffs, zi)
        q, dq, qbound = horner(coeffs[:, ::-1], wo)
        ratio_in = p / dp
        ratio_out = z / (deg - wo * dq / q)
        ratio = np.where(outside, ratio_out, ratio_in)
        tol = _RESIDUAL_ULPS * deg * _EPS
        small = np.where(outside, np.abs(q) <= tol * qbound, np.abs(p) <= tol * bound)
    # an exact zero of q or p makes the complex quotient nan; the root is already there
    ratio = np.where(small, 0.0, ratio)
    return ratio, small


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    deg = coeffs.shape[-1] - 1
    ratio = np.abs(coeffs[:, 0]) / np.abs(coeffs[:, -1])
    radius = np.where(ratio > 0, ratio, 1.0) ** (1.0 / deg)
    # offset keeps the start set free of conjugate pairs and of the real axis
    angles = 2 * math.pi * np.arange(deg) / deg + 0.4 + 0.25 / deg
    return radius[:, None] * np.exp(1j * angles)[None, :]


def _aberth_block(coeffs: np.ndarray, max_sweeps: int):
    batch, deg = coeffs.shape[0], coeffs.shape[1] - 1
    z = _initial_guesses(coeffs)
    done = np.zeros((batch, deg), dtype=bool)
    active = np.arange(batch)
    eye = np.eye(deg, dtype=bool)
    for _ in range(max_sweeps):
        if active.size == 0:
            break
        za = z[active]
        ca = coeffs[active]
        ratio, small_res = newton_ratio(ca, za)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = np.inf
            s = np.sum(1.0 / diff, axis=2)
            w = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(w)
        if np.any(bad):
            # stalled on a critical point or a collision; nudge off it
            w = np.where(bad, 1e-3 * (1.0 + np.abs(za)) * np.exp(1j * 0.7), w)
        da = done[active]
        w = np.where(da, 0.0, w)
        za = za - w
        da = da | (np.abs(w) < STEP_TOL * (1.0 + np.abs(za))) | (small_res & ~bad)
        z[active] = za
        done[active] = da
        active = active[~np.all(da, axis=1)]
    converged = np.all(done, axis=1)
    # one Newton polish, kept only where it does not increase the relative residual
    ratio, _ = newton_ratio(coeffs, z)
    zn = z - ratio
    ok = np.isfinite(zn)
    zn = np.where(ok, zn, z)
    better = ok & (relative_residual(coeffs, zn) <= relative_residual(coeffs, z))
    z = np.where(better, zn, z)
    return z, converged


def relative_residual(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|p(z)| / sum_j |c_j| |z|^j, evaluated without overflow."""
    outside = np.abs(z) > 1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        p, _, bound = horner(coeffs, np.where(outside, 0.0, z))
        q, _, qbound = horner(coeffs[:, ::-1], np.where(outside, 1.0 / z, 0.0))
        return np.where(outside, np.abs(q) / qbound, np.abs(p) / bound)


def effective_degree(coeffs: np.ndarray) -> int:
    """Degree after dropping leading coefficients below 1e-30 of the largest one."""
    c = np.abs(np.asarray(coeffs))
    big = c.max()
    if big == 0:
        return 0
    nz = np.nonzero(c >= 1e-30 * big)[0]
    return int(nz[-1])


def aberth_batch(coeffs: np.ndarray, max_sweeps: int = MAX_SWEEPS):
    """Roots of many polynomials of a common degree.

    Parameters
    ----------
    coeffs : (batch, deg + 1) array, ascending order, nonzero leading and
        trailing coefficients.

    Returns
    -------
    roots : (batch, deg) complex array
    converged : (batch,) bool array
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    batch, deg = coeffs.shape[0], coeffs.shape[1] - 1
    if deg < 1:
        return np.empty((batch, 0), dtype=complex), np.ones(batch, dtype=bool)
    if deg == 1:
        return (-coeffs[:, :1] / coeffs[:, 1:]), np.ones(batch, dtype=bool)
    step = max(1, _PAIR_BUDGET // (deg * deg))
    roots = np.empty((batch, deg), dtype=complex)
    conv = np.empty(batch, dtype=bool)
    for s in range(0, batch, step):
        roots[s:s + step], conv[s:s + step] = _aberth_block(coeffs[s:s + step], max_sweeps)
    return roots, conv


def roots_polynomial(coeffs, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """All roots of one polynomial given ascending coefficients.

    Leading coefficients below 1e-30 of the largest are dropped; exact zero
    roots (vanishing trailing coefficients) are returned as 0.

    Raises
    ------
    NoConvergence
        If the iteration has not settled after ``max_sweeps`` sweeps.
    """
    c = np.asarray(coeffs, dtype=complex)
    deg = effective_degree(c)
    c = c[: deg + 1]
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("the zero polynomial has no isolated roots")
    low = int(nz[0])
    zeros_at_origin = np.zeros(low, dtype=complex)
    c = c[low:]
    if c.size <= 1:
        return zeros_at_origin
    r, ok = aberth_batch(c[None, :], max_sweeps)
    if not ok[0]:
        raise NoConvergence(f"Aberth iteration did not converge in {max_sweeps} sweeps (degree {c.size - 1})")
    return np.concatenate([zeros_at_origin, r[0]])
