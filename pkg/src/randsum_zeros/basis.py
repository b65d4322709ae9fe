"""Basis-function families and their exact values and derivatives.

Every family is entire and real on the real line. Evaluation is vectorised:
``z`` may be a scalar or any array, and the returned :class:`EvalVector`
carries arrays of shape ``z.shape + (n + 1,)``.

Conjugate symmetry is enforced by construction: points in the lower half
plane are evaluated at their reflection and conjugated. On the real line
the arithmetic never produces a nonzero imaginary part.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegreeTooLarge, ValidationError

# exp() overflows just above this
_LOG_MAX = 709.0


class Kind(enum.Enum):
    POWER = "power"
    WEYL = "weyl"
    TAYLOR = "taylor"
    ROOT_BINOMIAL = "rootbinomial"
    FOURIER_COSINE = "cosine"
    FOURIER_MIXED = "mixed"

    @property
    def is_polynomial(self) -> bool:
        return self in _POLYNOMIAL_KINDS

    @property
    def is_trigonometric(self) -> bool:
        return not self.is_polynomial


_POLYNOMIAL_KINDS = frozenset({Kind.POWER, Kind.WEYL, Kind.TAYLOR, Kind.ROOT_BINOMIAL})

FAMILY_NAMES = tuple(k.value for k in Kind)


@dataclass(frozen=True)
class BasisFamily:
    """The function system f_0, ..., f_n.

    ``n`` is the index of the last term, so a family has ``n + 1`` functions.
    """

    kind: Kind
    n: int

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            raise ValidationError(f"kind must be a Kind, got {self.kind!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ValidationError(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise ValidationError(f"n must be >= 1 (a single constant term has no zeros), got {self.n}")
        if self.kind is Kind.FOURIER_MIXED and self.n % 2:
            raise ValidationError(f"the sine/cosine family needs an even n, got {self.n}")

    @classmethod
    def from_name(cls, name: str, n: int) -> BasisFamily:
        try:
            kind = Kind(name)
        except ValueError:
            raise ValidationError(
                f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}"
            ) from None
        return cls(kind, n)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def size(self) -> int:
        return self.n + 1

    def __str__(self) -> str:
        return f"{self.name}(n={self.n})"


@dataclass(frozen=True)
class EvalVector:
    """Values f_j(z) and derivatives f_j'(z) at one point or an array of points."""

    values: np.ndarray
    derivs: np.ndarray
    point: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[-1]


@lru_cache(maxsize=None)
def log_prefactors(kind: Kind, n: int) -> np.ndarray:
    """Natural logs of the constant multipliers of z**j for the polynomial families."""
    j = np.arange(n + 1)
    lg = np.array([math.lgamma(k + 1) for k in range(n + 1)])
    if kind is Kind.POWER:
        out = np.zeros(n + 1)
    elif kind is Kind.WEYL:
        out = -0.5 * lg
    elif kind is Kind.TAYLOR:
        out = -lg
    elif kind is Kind.ROOT_BINOMIAL:
        out = 0.5 * (lg[n] - lg - lg[n - j])
    else:
        raise ValueError(f"{kind} is not a polynomial family")
    out.setflags(write=False)
    return out


def prefactors(kind: Kind, n: int) -> np.ndarray:
    """Multipliers c_j with f_j(z) = c_j z**j (polynomial families only)."""
    return np.exp(log_prefactors(kind, n))


def evaluate_basis(family: BasisFamily, z) -> EvalVector:
    """Evaluate f_j(z) and f_j'(z), j = 0..n, with closed-form derivatives.

    Raises
    ------
    DegreeTooLarge
        If some value or derivative overflows double precision.
    """
    z = np.asarray(z, dtype=complex)
    flip = z.imag < 0
    zu = np.where(flip, np.conj(z), z)
    if family.kind.is_polynomial:
        values, derivs = _eval_polynomial(family, zu)
    else:
        values, derivs = _eval_trig(family, zu)
    f = flip[..., None]
    values = np.where(f, np.conj(values), values)
    derivs = np.where(f, np.conj(derivs), derivs)
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(derivs))):
        raise DegreeTooLarge(f"{family} overflows double precision at some requested point")
    return EvalVector(values, derivs, z)


def _check_log(logmag: np.ndarray, family: BasisFamily) -> None:
    if np.any(logmag > _LOG_MAX):
        raise DegreeTooLarge(
            f"{family}: basis magnitude exp({float(np.max(logmag)):.1f}) overflows double precision"
        )


def _eval_polynomial(family: BasisFamily, z: np.ndarray):
    # magnitudes in log space, phases as repeated products of the unit u = z/|z|
    n = family.n
    j = np.arange(n + 1, dtype=float)
    lp = log_prefactors(family.kind, n)
    r = np.abs(z)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        # componentwise real division: complex division overflows for subnormal |z|
        zc = z[..., None]
        u = np.where(r > 0, zc.real / r + 1j * (zc.imag / r), 1.0 + 0j)
        logr = np.log(r)
        vlog = lp + np.where(j == 0, 0.0, j * logr)
        jm1 = np.maximum(j - 1, 0)
        dlog = lp + np.log(np.maximum(j, 1)) + np.where(jm1 == 0, 0.0, jm1 * logr)
    _check_log(vlog, family)
    _check_log(dlog, family)
    steps = np.broadcast_to(u, z.shape + (n + 1,)).copy()
    steps[..., 0] = 1.0
    phase = np.cumprod(steps, axis=-1)
    values = np.exp(vlog) * phase
    derivs = np.zeros_like(values)
    derivs[..., 1:] = np.exp(dlog[..., 1:]) * phase[..., :-1]
    return values, derivs


def trig_layout(family: BasisFamily) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies k_j and a flag is_sine_j so that f_j(z) is cos(k_j z) or sin(k_j z)."""
    j = np.arange(family.n + 1)
    if family.kind is Kind.FOURIER_COSINE:
        return j.astype(float), np.zeros(family.n + 1, dtype=bool)
    if family.kind is Kind.FOURIER_MIXED:
        is_sine = j % 2 == 1
        k = np.where(is_sine, (j + 1) // 2, j // 2)
        return k.astype(float), is_sine
    raise ValueError(f"{family.kind} is not a trigonometric family")


def _eval_trig(family: BasisFamily, z: np.ndarray):
    k, is_sine = trig_layout(family)
    x = z.real[..., None]
    y = z.imag[..., None]
    _check_log(k * np.abs(y) - math.log(2.0), family)
    kx = k * x
    ky = k * y
    c, s = np.cos(kx), np.sin(kx)
    ch, sh = np.cosh(ky), np.sinh(ky)
    cos_kz = c * ch - 1j * (s * sh)
    sin_kz = s * ch + 1j * (c * sh)
    values = np.where(is_sine, sin_kz, cos_kz)
    derivs = np.where(is_sine, k * cos_kz, -k * sin_kz)
    return values, derivs


def evaluate_rotated_cosine(family: BasisFamily, y) -> EvalVector:
    """Evaluate the rotated cosine system g_j(t) = f_j(i t) = cosh(j t) at real t.

    Its derivative is g_j'(t) = i f_j'(i t) = j sinh(j t); both are real for
    real t, so the real-axis machinery applies to the imaginary axis of the
    original family.
    """
    if family.kind is not Kind.FOURIER_COSINE:
        raise ValueError("rotation to the imaginary axis is only defined for the cosine family")
    y = np.asarray(y, dtype=float)
    k = np.arange(family.n + 1, dtype=float)
    _check_log(k * np.abs(y)[..., None] - math.log(2.0), family)
    ky = k * y[..., None]
    values = np.cosh(ky) + 0j
    derivs = k * np.sinh(ky) + 0j
    return EvalVector(values, derivs, y + 0j)
