"""Vectorised double-double arithmetic.

Only what the kernel formulas need: error-free sums and products, a
compensated dot product, and +, -, *, sqrt on (hi, lo) pairs. Inputs are
assumed to be far from overflow (the kernels work on normalised vectors).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


@dataclass(frozen=True)
class DD:
    """A real double-double number (or array of them): value = hi + lo."""

    hi: np.ndarray
    lo: np.ndarray

    @classmethod
    def of(cls, x) -> DD:
        if isinstance(x, DD):
            return x
        x = np.asarray(x, dtype=float)
        return cls(x, np.zeros_like(x))

    def __add__(self, other) -> DD:
        other = DD.of(other)
        s, e = two_sum(self.hi, other.hi)
        t, f = two_sum(self.lo, other.lo)
        e = e + t
        s, e = quick_two_sum(s, e)
        e = e + f
        return DD(*quick_two_sum(s, e))

    __radd__ = __add__

    def __neg__(self) -> DD:
        return DD(-self.hi, -self.lo)

    def __sub__(self, other) -> DD:
        return self + (-DD.of(other))

    def __rsub__(self, other) -> DD:
        return DD.of(other) - self

    def __mul__(self, other) -> DD:
        if not isinstance(other, DD):
            other = np.asarray(other, dtype=float)
            p, e = two_prod(self.hi, other)
            e = e + self.lo * other
            return DD(*quick_two_sum(p, e))
        p, e = two_prod(self.hi, other.hi)
        e = e + (self.hi * other.lo + self.lo * other.hi)
        return DD(*quick_two_sum(p, e))

    __rmul__ = __mul__

    def sqrt(self) -> DD:
        """Square root of a non-negative value; negatives are clamped to 0."""
        hi = np.maximum(self.hi, 0.0)
        s = np.sqrt(hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            p, e = two_prod(s, s)
            corr = ((hi - p) - e + np.where(self.hi > 0, self.lo, 0.0)) / (2.0 * s)
        corr = np.where(s > 0, corr, 0.0)
        return DD(*quick_two_sum(s, corr))

    def value(self) -> np.ndarray:
        return self.hi + self.lo


@dataclass(frozen=True)
class CDD:
    """A complex double-double number stored as two :class:`DD` parts."""

    re: DD
    im: DD

    @classmethod
    def of(cls, z) -> CDD:
        if isinstance(z, CDD):
            return z
        if isinstance(z, DD):
            return cls(z, DD.of(np.zeros_like(z.hi)))
        z = np.asarray(z)
        return cls(DD.of(z.real), DD.of(np.imag(z)))

    def __add__(self, other) -> CDD:
        other = CDD.of(other)
        return CDD(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> CDD:
        return CDD(-self.re, -self.im)

    def __sub__(self, other) -> CDD:
        return self + (-CDD.of(other))

    def __mul__(self, other) -> CDD:
        if isinstance(other, (DD, float, int)) or (
            isinstance(other, np.ndarray) and not np.iscomplexobj(other)
        ):
            return CDD(self.re * other, self.im * other)
        other = CDD.of(other)
        return CDD(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conj(self) -> CDD:
        return CDD(self.re, -self.im)

    def abs2(self) -> DD:
        return self.re * self.re + self.im * self.im

    def value(self) -> np.ndarray:
        return self.re.value() + 1j * self.im.value()


def dot2(x: np.ndarray, y: np.ndarray) -> DD:
    """Compensated dot product along the last axis.

    Each product is split exactly and the partial sums are accumulated
    with error-free transformations, so the result is as accurate as if
    computed in twice the working precision.
    """
    p, e = two_prod(x, y)
    n = p.shape[-1]
    s = p[..., 0]
    c = e[..., 0]
    for j in range(1, n):
        s, t = two_sum(s, p[..., j])
        c = c + (t + e[..., j])
    return DD(*quick_two_sum(s, c))
