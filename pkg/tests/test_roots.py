from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randsum_zeros.errors import NoConvergence
from randsum_zeros.roots import aberth_batch, effective_degree, relative_residual, roots_polynomial


def sorted_roots(r):
    return np.array(sorted(r, key=lambda z: (round(z.real, 8), z.imag)))


def test_quadratic_examples():
    np.testing.assert_allclose(sorted_roots(roots_polynomial([-1, 0, 1])), [-1, 1], atol=1e-14)
    np.testing.assert_allclose(sorted_roots(roots_polynomial([6, -5, 1])), [2, 3], atol=1e-13)


def test_complex_pair():
    r = sorted_roots(roots_polynomial([1, 0, 1]))
    np.testing.assert_allclose(r, [-1j, 1j], atol=1e-14)


def test_leading_coefficients_below_threshold_are_dropped():
    assert effective_degree(np.array([1.0, 2.0, 1e-40])) == 1
    assert roots_polynomial([2.0, 1.0, 1e-40]).tolist() == [-2.0]


def test_vanishing_trailing_coefficients_give_zero_roots():
    r = roots_polynomial([0, 0, -4, 0, 1])
    assert np.count_nonzero(r == 0) == 2
    np.testing.assert_allclose(sorted_roots(r[r != 0]), [-2, 2], atol=1e-14)


def test_zero_polynomial_is_rejected():
    with pytest.raises(ValueError):
        roots_polynomial([0.0, 0.0])


def test_one_sweep_reports_non_convergence():
    c = np.random.default_rng(1).standard_normal(30)
    with pytest.raises(NoConvergence):
        roots_polynomial(c, max_sweeps=1)


def test_batch_of_degree_80_gaussian_polynomials():
    rng = np.random.default_rng(2)
    c = rng.standard_normal((200, 81))
    r, ok = aberth_batch(c)
    assert ok.all()
    assert np.max(relative_residual(c, r)) < 1e-12


def test_backward_error_against_numpy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        c = rng.standard_normal(11)
        mine = roots_polynomial(c)
        assert np.max(relative_residual(c[None, :], mine[None, :])) < 1e-8
        theirs = np.roots(c[::-1])
        # every numpy root has one of ours nearby
        d = np.abs(theirs[:, None] - mine[None, :]).min(axis=1)
        assert np.all(d < 1e-6 * np.maximum(1, np.abs(theirs)))


def test_real_coefficients_give_conjugate_pairs():
    c = np.random.default_rng(4).standard_normal((50, 21))
    r, ok = aberth_batch(c)
    assert ok.all()
    for row in r:
        conj = np.abs(row[:, None] - np.conj(row)[None, :]).min(axis=1)
        assert np.all(conj < 1e-8 * np.maximum(1, np.abs(row)))


@settings(max_examples=60, deadline=None)
@given(
    roots=st.lists(
        st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False, allow_infinity=False),
        min_size=2,
        max_size=8,
    )
)
def test_residual_is_small_for_polynomials_built_from_roots(roots):
    c = np.poly(np.array(roots))[::-1]
    r = roots_polynomial(c)
    assert r.size == len(roots)
    assert np.max(relative_residual(c[None, :].astype(complex), r[None, :])) < 1e-10
