"""The eight kernel quantities A0, A1, A2, B0, B1, B2, D0, E1 at a point.

All six defining sums are built from the ten real Gram products of the
vectors a = Re f, b = Im f, c = Re f', d = Im f'. Those products are
accumulated as compensated dot products in double-double precision and are
kept on the bundle, so that downstream formulas whose terms cancel near the
real axis can be evaluated without losing the answer to roundoff.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._dd import CDD, DD, dot2
from .basis import EvalVector
from .errors import AllZero, NotOnAxis

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class Gram:
    """Double-double Gram products of the normalised (a, b, c, d) vectors."""

    aa: DD
    bb: DD
    ab: DD
    ac: DD
    ad: DD
    bc: DD
    bd: DD
    cc: DD
    dd: DD
    cd: DD

    def A0(self) -> CDD:
        return CDD(self.aa - self.bb, self.ab * 2.0)

    def B0(self) -> DD:
        return self.aa + self.bb

    def A1(self) -> CDD:
        return CDD(self.ac - self.bd, self.ad + self.bc)

    def B1(self) -> CDD:
        return CDD(self.ac + self.bd, self.ad - self.bc)

    def A2(self) -> CDD:
        return CDD(self.cc - self.dd, self.cd * 2.0)

    def B2(self) -> DD:
        return self.cc + self.dd

    def D0_sq(self) -> DD:
        B0 = self.B0()
        return B0 * B0 - self.A0().abs2()

    def E1_sq(self) -> CDD:
        A1 = self.A1()
        return self.A2() * self.A0() - A1 * A1


@dataclass(frozen=True)
class KernelBundle:
    """Kernel values at one point (or an array of points).

    The sums are taken over the basis vectors divided by ``scale``; every
    density built from them is invariant under that common rescaling.
    """

    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    B0: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    D0: np.ndarray
    E1_sq: np.ndarray
    scale: np.ndarray
    point: Optional[np.ndarray] = None
    gram: Optional[Gram] = None

    @property
    def D0_rel(self) -> np.ndarray:
        """D0 / B0, the scale-free distance from the vanishing set."""
        return self.D0 / self.B0


def compute_kernels(ev: EvalVector) -> KernelBundle:
    """Form the kernel sums from basis values and derivatives.

    Raises
    ------
    AllZero
        If every f_j vanishes at some requested point.
    """
    if ev.values.shape[-1] == 0:
        raise ValueError("empty evaluation vector")
    vmax = np.max(np.abs(ev.values), axis=-1)
    if np.any(vmax == 0):
        raise AllZero("all basis functions vanish at the requested point")
    scale = np.maximum(vmax, _TINY)
    v = ev.values / scale[..., None]
    dv = ev.derivs / scale[..., None]
    a, b, c, d = v.real, v.imag, dv.real, dv.imag
    g = Gram(
        aa=dot2(a, a), bb=dot2(b, b), ab=dot2(a, b),
        ac=dot2(a, c), ad=dot2(a, d), bc=dot2(b, c), bd=dot2(b, d),
        cc=dot2(c, c), dd=dot2(d, d), cd=dot2(c, d),
    )
    B0 = g.B0()
    D0 = g.D0_sq().sqrt().value()
    return KernelBundle(
        A0=g.A0().value(),
        A1=g.A1().value(),
        A2=g.A2().value(),
        B0=B0.value(),
        B1=g.B1().value(),
        B2=g.B2().value(),
        D0=D0,
        E1_sq=g.E1_sq().value(),
        scale=scale,
        point=ev.point,
        gram=g,
    )


def e1_real(kb: KernelBundle, rtol: float = 1e-8) -> np.ndarray:
    """E1 = sqrt(A2 A0 - A1^2) on the real axis, as a non-negative real.

    Raises
    ------
    NotOnAxis
        If the radicand has an imaginary part larger than ``rtol`` times its
        modulus, i.e. the bundle was not taken on the real line.
    """
    e = np.asarray(kb.E1_sq)
    if np.any(np.abs(e.imag) > rtol * np.abs(e)):
        raise NotOnAxis("E1 radicand is not real; the point is off the real axis")
    return np.sqrt(np.maximum(e.real, 0.0))
