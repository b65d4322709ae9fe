"""Zero intensities of random sums with iid N(0, 1) coefficients.

``h_density`` is the density of complex zeros with respect to area,
``g_density`` the density of real zeros with respect to length, and
``f_expectation`` the expectation F = E[P'/P] whose contour integral counts
zeros. Formulas are evaluated on the double-double Gram data carried by the
kernel bundle whenever it is present; their numerators cancel to O(y^4)
next to the real axis and plain doubles lose every digit there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._dd import CDD, DD
from .basis import BasisFamily, Kind, evaluate_basis, evaluate_rotated_cosine
from .errors import NumericalInconsistency, OnVanishingSet, UnsupportedFamily, ValidationError
from .kernels import KernelBundle, compute_kernels, e1_real

# clamp threshold for negative roundoff in h, relative to the natural scale B2/D0
_NEG_CLAMP = 1e-12


@dataclass(frozen=True)
class AxisBand:
    """Points with D0/B0 < ``rel_threshold`` count as lying on the vanishing set."""

    rel_threshold: float = 1e-8

    def __post_init__(self):
        if not 0 < self.rel_threshold < 1e-3:
            raise ValidationError(f"rel_threshold must lie in (0, 1e-3), got {self.rel_threshold}")

    def contains(self, kb: KernelBundle) -> np.ndarray:
        return kb.D0_rel < self.rel_threshold


DEFAULT_BAND = AxisBand()


def _check_off_axis(kb: KernelBundle, band: AxisBand) -> None:
    inside = band.contains(kb)
    if np.any(inside):
        raise OnVanishingSet(
            f"{int(np.count_nonzero(inside))} point(s) have D0/B0 below {band.rel_threshold:g}"
        )


def _parts(kb: KernelBundle):
    """Kernel quantities as double-double numbers (exact widening when no Gram data)."""
    g = kb.gram
    if g is not None:
        return g.A0(), g.A1(), g.B0(), g.B1(), g.B2(), g.D0_sq()
    A0, A1, B1 = CDD.of(kb.A0), CDD.of(kb.A1), CDD.of(kb.B1)
    B0, B2 = DD.of(np.real(kb.B0)), DD.of(np.real(kb.B2))
    return A0, A1, B0, B1, B2, DD.of(np.asarray(kb.D0) ** 2)


def h_numerator(kb: KernelBundle) -> np.ndarray:
    """B2 D0^2 - B0 (|B1|^2 + |A1|^2) + 2 Re(A0 B1 conj(A1)), in double-double."""
    A0, A1, B0, B1, B2, D0sq = _parts(kb)
    num = B2 * D0sq - B0 * (B1.abs2() + A1.abs2()) + (A0 * B1 * A1.conj()).re * 2.0
    return num.value()


def h_density(kb: KernelBundle, band: AxisBand = DEFAULT_BAND) -> np.ndarray:
    """Intensity of complex zeros, per unit area.

    Raises
    ------
    OnVanishingSet
        If some point lies within the axis band.
    NumericalInconsistency
        If the formula returns a negative value beyond roundoff.
    """
    _check_off_axis(kb, band)
    D0 = np.asarray(kb.D0, dtype=float)
    h = h_numerator(kb) / (math.pi * D0**3)
    floor = -_NEG_CLAMP * np.real(kb.B2) / D0
    if np.any(h < floor):
        worst = float(np.min(h / np.abs(floor)))
        raise NumericalInconsistency(f"h came out negative ({worst:.3g} x clamp tolerance)")
    return np.maximum(h, 0.0)


def g_density(kb: KernelBundle) -> np.ndarray:
    """Intensity of real zeros, per unit length, from a bundle taken at real x."""
    return e1_real(kb) / (math.pi * np.real(kb.B0))


def f_expectation(kb: KernelBundle, band: AxisBand = DEFAULT_BAND) -> np.ndarray:
    """F = E[P'/P] off the vanishing set.

    Uses the expanded-denominator form
    (B1 D0 + B0 B1 - conj(A0) A1) / (B0 D0 + B0^2 - conj(A0) A0).
    """
    _check_off_axis(kb, band)
    A0, A1, B0, B1, _, D0sq = _parts(kb)
    D0 = D0sq.sqrt()
    num = B1 * D0 + B1 * B0 - A0.conj() * A1
    den = B0 * D0 + B0 * B0 - A0.abs2()
    return num.value() / den.value()


def f_jump_limits(kb: KernelBundle) -> tuple[np.ndarray, np.ndarray]:
    """One-sided limits of F at a real point: (from above, from below).

    They are (B1 - i E1)/B0 and (B1 + i E1)/B0; the gap between them divided by
    2 pi i is the real-zero density.
    """
    E1 = e1_real(kb)
    B0 = np.real(kb.B0)
    B1 = np.asarray(kb.B1)
    return (B1 - 1j * E1) / B0, (B1 + 1j * E1) / B0


def g_density_imag_axis(family: BasisFamily, y) -> np.ndarray:
    """Density of purely imaginary zeros of the cosine family, per unit length.

    The rotated system f_j(i t) = cosh(j t) is real on the real line, so the
    real-axis density applies to it at t = y.
    """
    if family.kind is not Kind.FOURIER_COSINE:
        raise UnsupportedFamily(f"imaginary-axis density is only defined for the cosine family, not {family.name}")
    return g_density(compute_kernels(evaluate_rotated_cosine(family, y)))


# -- point-wise conveniences used by the quadrature, rendering and sampling code


def kernels_at(family: BasisFamily, z) -> KernelBundle:
    return compute_kernels(evaluate_basis(family, z))


def intensity(family: BasisFamily, z, band: AxisBand = DEFAULT_BAND) -> np.ndarray:
    """h at the points ``z`` (all of which must be off the vanishing set)."""
    return h_density(kernels_at(family, z), band)


def real_intensity(family: BasisFamily, x) -> np.ndarray:
    """g at the real points ``x``."""
    x = np.asarray(x, dtype=float)
    return g_density(kernels_at(family, x + 0j))


def expectation(family: BasisFamily, z, band: AxisBand = DEFAULT_BAND) -> np.ndarray:
    """F at the points ``z``."""
    return f_expectation(kernels_at(family, z), band)
