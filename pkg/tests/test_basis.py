from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALL_FAMILIES, family
from randsum_zeros.basis import (
    FAMILY_NAMES,
    BasisFamily,
    EvalVector,
    Kind,
    evaluate_basis,
    evaluate_rotated_cosine,
    log_prefactors,
    trig_layout,
)
from randsum_zeros.errors import DegreeTooLarge, ValidationError


def pascal_row(n: int) -> list[int]:
    row = [1]
    for _ in range(n):
        row = [1] + [a + b for a, b in zip(row, row[1:])] + [1]
    return row


def test_power_n1_at_i_is_exact():
    ev = evaluate_basis(family("power", 1), 1j)
    assert ev.values.tolist() == [1, 1j]
    assert ev.derivs.tolist() == [0, 1]


def test_cosine_n1_on_imaginary_axis():
    y = 0.8
    ev = evaluate_basis(family("cosine", 1), 1j * y)
    np.testing.assert_allclose(ev.values, [1, math.cosh(y)], rtol=1e-15)
    np.testing.assert_allclose(ev.derivs, [0, -1j * math.sinh(y)], rtol=1e-15)


def test_weyl_at_origin():
    ev = evaluate_basis(family("weyl", 2), 0.0)
    assert ev.values.tolist() == [1, 0, 0]
    assert ev.derivs.tolist() == [0, 1, 0]


def test_rootbinomial_at_one_matches_pascal():
    ev = evaluate_basis(family("rootbinomial", 10), 1.0)
    want = np.sqrt(pascal_row(10))
    np.testing.assert_allclose(ev.values.real, want, rtol=1e-14)
    assert ev.values[3].real == pytest.approx(math.sqrt(120), rel=1e-14)


def test_rootbinomial_derivative_prefactor():
    z = 0.7 - 0.2j
    ev = evaluate_basis(family("rootbinomial", 6), z)
    row = pascal_row(6)
    want = [j * math.sqrt(row[j]) * z ** (j - 1) if j else 0 for j in range(7)]
    np.testing.assert_allclose(ev.derivs, want, rtol=1e-13)


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=str)
def test_real_axis_values_have_exactly_zero_imaginary_part(fam):
    x = np.random.default_rng(1).uniform(-10, 10, 1000)
    ev = evaluate_basis(fam, x)
    assert np.max(np.abs(ev.values.imag)) == 0
    assert np.max(np.abs(ev.derivs.imag)) == 0


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=str)
def test_conjugate_reflection_is_exact(fam):
    rng = np.random.default_rng(2)
    z = rng.uniform(-3, 3, 200) + 1j * rng.uniform(-3, 3, 200)
    a = evaluate_basis(fam, z)
    b = evaluate_basis(fam, np.conj(z))
    assert np.array_equal(b.values, np.conj(a.values))
    assert np.array_equal(b.derivs, np.conj(a.derivs))


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=str)
def test_derivatives_match_central_differences(fam):
    rng = np.random.default_rng(3)
    z = rng.uniform(-2, 2, 100) + 1j * rng.uniform(-2, 2, 100)
    for zz in z:
        d = 1e-6 * max(1.0, abs(zz))
        fd = (evaluate_basis(fam, zz + d).values - evaluate_basis(fam, zz - d).values) / (2 * d)
        exact = evaluate_basis(fam, zz).derivs
        floor = 1e-9 * np.max(np.abs(exact))
        assert np.all(np.abs(fd - exact) <= 1e-6 * np.maximum(np.abs(exact), floor))


@settings(max_examples=60, deadline=None)
@given(
    name=st.sampled_from(FAMILY_NAMES),
    half_n=st.integers(1, 12),
    x=st.floats(-5, 5),
    y=st.floats(-5, 5),
)
def test_conjugate_symmetry_property(name, half_n, x, y):
    fam = BasisFamily.from_name(name, 2 * half_n)
    z = complex(x, y)
    a, b = evaluate_basis(fam, z), evaluate_basis(fam, z.conjugate())
    assert np.array_equal(b.values, np.conj(a.values))


def test_shapes_follow_input():
    ev = evaluate_basis(family("taylor", 4), np.zeros((3, 2)))
    assert isinstance(ev, EvalVector)
    assert ev.values.shape == (3, 2, 5) and ev.derivs.shape == (3, 2, 5)
    assert ev.size == 5


def test_mixed_layout_matches_index_mapping():
    k, is_sine = trig_layout(family("mixed", 4))
    assert k.tolist() == [0, 1, 1, 2, 2]
    assert is_sine.tolist() == [False, True, False, True, False]
    z = 0.3 + 0.4j
    ev = evaluate_basis(family("mixed", 4), z)
    want = [1, np.sin(z), np.cos(z), np.sin(2 * z), np.cos(2 * z)]
    np.testing.assert_allclose(ev.values, want, rtol=1e-14)


def test_rotated_cosine_is_cosine_on_imaginary_axis():
    fam = family("cosine", 5)
    y = np.linspace(-2, 2, 9)
    rot = evaluate_rotated_cosine(fam, y)
    direct = evaluate_basis(fam, 1j * y)
    np.testing.assert_allclose(rot.values, direct.values, rtol=1e-15)
    # d/dy f(iy) = i f'(iy)
    np.testing.assert_allclose(rot.derivs, 1j * direct.derivs, rtol=1e-14, atol=1e-300)


@pytest.mark.parametrize("bad", [0, -1, 1.5, True])
def test_invalid_degree_rejected(bad):
    with pytest.raises(ValidationError):
        BasisFamily(Kind.POWER, bad)


def test_mixed_requires_even_n():
    with pytest.raises(ValidationError, match="even"):
        BasisFamily(Kind.FOURIER_MIXED, 3)


def test_unknown_family_name_lists_choices():
    with pytest.raises(ValidationError, match="rootbinomial"):
        BasisFamily.from_name("powr", 3)


def test_overflow_signals_degree_too_large():
    with pytest.raises(DegreeTooLarge):
        evaluate_basis(family("power", 200), 100.0)
    with pytest.raises(DegreeTooLarge):
        evaluate_basis(family("cosine", 100), 10j)


def test_log_prefactors_survive_large_n():
    lp = log_prefactors(Kind.TAYLOR, 170)
    assert np.all(np.isfinite(lp))
    assert lp[170] == pytest.approx(-math.lgamma(171), rel=1e-14)
    # 171! does not fit in a double
    with pytest.raises(OverflowError):
        float(math.factorial(171))


def test_weyl_n170_stays_finite():
    ev = evaluate_basis(family("weyl", 170), 5.0 + 1j)
    assert np.all(np.isfinite(ev.values)) and np.all(np.isfinite(ev.derivs))
