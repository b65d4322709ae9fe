from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALL_FAMILIES, family
from randsum_zeros.basis import EvalVector, evaluate_basis
from randsum_zeros.density import g_density, h_density
from randsum_zeros.errors import AllZero, NotOnAxis
from randsum_zeros.kernels import compute_kernels, e1_real


def unscaled(kb, name):
    return getattr(kb, name) * kb.scale**2


def test_power_n1_at_i():
    kb = compute_kernels(evaluate_basis(family("power", 1), 1j))
    assert kb.scale == 1
    assert kb.A0 == 0 and kb.B0 == 2
    assert kb.A1 == 1j and kb.B1 == -1j
    assert kb.A2 == 1 and kb.B2 == 1
    assert kb.D0 == 2


def test_weyl_at_origin():
    for n in (1, 5, 40):
        kb = compute_kernels(evaluate_basis(family("weyl", n), 0.0))
        assert (kb.A0, kb.B0, kb.A1, kb.B1, kb.A2, kb.B2, kb.D0) == (1, 1, 0, 0, 1, 1, 0)
        assert kb.E1_sq == 1


def rootbinomial_closed_forms(n, z):
    r2 = abs(z) ** 2
    return {
        "A0": (1 + z * z) ** n,
        "B0": (1 + r2) ** n,
        "A1": n * z * (1 + z * z) ** (n - 1),
        "B1": n * np.conj(z) * (1 + r2) ** (n - 1),
        "A2": n * (1 + n * z * z) * (1 + z * z) ** (n - 2),
        "B2": n * (1 + n * r2) * (1 + r2) ** (n - 2),
    }


def test_rootbinomial_closed_forms_at_random_points():
    rng = np.random.default_rng(5)
    n = 10
    fam = family("rootbinomial", n)
    for z in rng.uniform(-2, 2, 100) + 1j * rng.uniform(-2, 2, 100):
        kb = compute_kernels(evaluate_basis(fam, z))
        want = rootbinomial_closed_forms(n, z)
        for key in ("B0", "B1", "B2"):
            assert abs(unscaled(kb, key) - want[key]) <= 1e-10 * abs(want[key])
        # A-sums can cancel; compare against the B-sum magnitude
        for key, ref in (("A0", "B0"), ("A1", "B1"), ("A2", "B2")):
            assert abs(unscaled(kb, key) - want[key]) <= 1e-10 * abs(want[ref])


def test_rootbinomial_real_axis_matches_closed_form():
    x = 0.37
    kb = compute_kernels(evaluate_basis(family("rootbinomial", 10), x))
    assert unscaled(kb, "A0") == pytest.approx((1 + x * x) ** 10, rel=1e-14)
    assert unscaled(kb, "B0") == pytest.approx((1 + x * x) ** 10, rel=1e-14)
    assert unscaled(kb, "A1") == pytest.approx(10 * x * (1 + x * x) ** 9, rel=1e-14)


def test_mixed_closed_forms_at_random_points():
    # |y| <= 1 keeps the cancellation B0 / |A0| below about 1e4, so 1e-10 is reachable
    rng = np.random.default_rng(6)
    fam = family("mixed", 10)
    for z in rng.uniform(-4, 4, 100) + 1j * rng.uniform(-1, 1, 100):
        kb = compute_kernels(evaluate_basis(fam, z))
        assert abs(unscaled(kb, "A0") - 6) <= 1e-10 * 6
        assert abs(unscaled(kb, "A1")) <= 1e-10 * abs(unscaled(kb, "B1")) + 1e-10 * unscaled(kb, "B0")
        assert abs(unscaled(kb, "A2") - 55) <= 1e-10 * max(55, float(unscaled(kb, "B2")))


def test_mixed_closed_forms_relative_to_b0_in_a_wider_strip():
    rng = np.random.default_rng(9)
    fam = family("mixed", 10)
    z = rng.uniform(-4, 4, 200) + 1j * rng.uniform(-3, 3, 200)
    kb = compute_kernels(evaluate_basis(fam, z))
    B0 = unscaled(kb, "B0")
    assert np.all(np.abs(unscaled(kb, "A0") - 6) <= 1e-14 * B0)
    assert np.all(np.abs(unscaled(kb, "A2") - 55) <= 1e-14 * unscaled(kb, "B2"))


def test_e1_examples():
    for x in (-3.0, 0.0, 0.5, 7.0):
        kb = compute_kernels(evaluate_basis(family("power", 1), x))
        assert e1_real(kb) * kb.scale**2 == pytest.approx(1.0, rel=1e-13)
    for n in (1, 4, 10):
        kb = compute_kernels(evaluate_basis(family("rootbinomial", n), 0.0))
        assert e1_real(kb) * kb.scale**2 == pytest.approx(math.sqrt(n), rel=1e-14)
    kb = compute_kernels(evaluate_basis(family("mixed", 10), 1.234))
    assert e1_real(kb) * kb.scale**2 == pytest.approx(math.sqrt(330), rel=1e-13)


def test_e1_off_axis_is_rejected():
    kb = compute_kernels(evaluate_basis(family("power", 10), 1 + 1j))
    with pytest.raises(NotOnAxis):
        e1_real(kb)


def test_all_zero_vector_rejected():
    ev = EvalVector(np.zeros(3, complex), np.ones(3, complex), np.array(0j))
    with pytest.raises(AllZero):
        compute_kernels(ev)


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=str)
def test_cauchy_schwarz_and_real_axis_coincidence(fam):
    rng = np.random.default_rng(7)
    z = rng.uniform(-3, 3, 500) + 1j * rng.uniform(-2, 2, 500)
    kb = compute_kernels(evaluate_basis(fam, z))
    assert np.all(kb.B0 > 0)
    assert np.all(kb.B0 * (1 + 1e-14) >= np.abs(kb.A0))
    assert np.all(kb.D0 >= 0)
    x = rng.uniform(-3, 3, 200)
    kr = compute_kernels(evaluate_basis(fam, x))
    assert np.array_equal(kr.A0, kr.B0) and np.array_equal(kr.A1, kr.B1) and np.array_equal(kr.A2, kr.B2)
    assert np.all(kr.D0 == 0)
    assert np.all(kr.E1_sq.imag == 0) and np.all(kr.E1_sq.real >= 0)


def test_cosine_vanishing_set_covers_both_axes():
    fam = family("cosine", 10)
    t = np.random.default_rng(8).uniform(-3, 3, 50)
    assert np.all(compute_kernels(evaluate_basis(fam, t)).D0_rel < 1e-10)
    assert np.all(compute_kernels(evaluate_basis(fam, 1j * t)).D0_rel < 1e-10)


@settings(max_examples=40, deadline=None)
@given(
    fam=st.sampled_from(ALL_FAMILIES),
    x=st.floats(-2, 2),
    y=st.floats(0.05, 2),
    c=st.floats(1e-30, 1e30),
)
def test_densities_invariant_under_common_rescaling(fam, x, y, c):
    ev = evaluate_basis(fam, complex(x, y))
    scaled = EvalVector(ev.values * c, ev.derivs * c, ev.point)
    kb, ks = compute_kernels(ev), compute_kernels(scaled)
    if kb.D0_rel > 1e-6:
        h1, h2 = h_density(kb), h_density(ks)
        assert abs(h1 - h2) <= 1e-12 * max(abs(h1), 1e-300) + 1e-12 * float(kb.B2 / kb.D0)
    er = evaluate_basis(fam, x)
    sr = EvalVector(er.values * c, er.derivs * c, er.point)
    g1, g2 = g_density(compute_kernels(er)), g_density(compute_kernels(sr))
    assert abs(g1 - g2) <= 1e-12 * max(g1, 1e-300)
