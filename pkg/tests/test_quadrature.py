from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import ALL_FAMILIES, family
from randsum_zeros.errors import ContourTooCloseToAxis, ValidationError
from randsum_zeros.quadrature import (
    QuadratureSpec,
    Window,
    area_integral_h,
    composite_gl,
    contour_integral,
    expected_real_zeros,
    expected_zeros_area,
    expected_zeros_contour,
    line_integral_g,
    vertical_lines,
)


def test_composite_rule_integrates_polynomials_exactly():
    t, w = composite_gl(-1.0, 2.0, 3)
    assert np.sum(w * t**31) == pytest.approx((2.0**32 - 1.0) / 32, rel=1e-13)
    # open rule: no node on the outer ends
    assert t.min() > -1.0 and t.max() < 2.0


def test_degree_one_has_no_complex_zeros_in_the_upper_half_plane():
    w = Window(-0.5, 0.5, 0.25, 0.75)
    assert expected_zeros_contour(family("power", 1), w) == pytest.approx(0.0, abs=1e-12)
    assert abs(contour_integral(family("power", 1), w).imag) < 1e-12


def test_power_n10_contour_matches_area():
    fam = family("power", 10)
    w = Window(0.2, 1.4, 0.2, 1.4)
    c = expected_zeros_contour(fam, w)
    a = expected_zeros_area(fam, w, QuadratureSpec(grid_nx=400, grid_ny=400))
    assert c == pytest.approx(a, rel=1e-4)
    assert abs(contour_integral(fam, w).imag) < 1e-6


def test_straddling_window_adds_the_real_line_integral():
    fam = family("power", 10)
    w = Window(-3.0, 3.0, -3.0, 3.0)
    c = contour_integral(fam, w)
    assert abs(c.imag) < 1e-6
    assert c.real == pytest.approx(expected_zeros_area(fam, w), rel=1e-3)


def test_rootbinomial_real_count():
    fam = family("rootbinomial", 10)
    inner = line_integral_g(fam, -50, 50, 4096)
    assert inner == pytest.approx(math.sqrt(10) * 2 / math.pi * math.atan(50), rel=1e-10)
    assert expected_real_zeros(fam) == pytest.approx(math.sqrt(10), abs=1e-6)


def test_mixed_period_mass():
    fam = family("mixed", 10)
    assert line_integral_g(fam, 0, 2 * math.pi) == pytest.approx(math.sqrt(110 / 3), rel=1e-12)


def test_power_n10_mass_in_the_six_square_falls_short_by_the_mass_outside():
    # the complement of [-6, 6]^2 maps into [-1/6, 1/6]^2 under z -> 1/z, which
    # preserves the power ensemble; the deficit from 10 is bounded by that count
    fam = family("power", 10)
    spec = QuadratureSpec(grid_nx=440, grid_ny=440, axis_nodes=1024)
    total = expected_zeros_area(fam, Window(-6, 6, -6, 6), spec)
    inner = expected_zeros_area(fam, Window(-1 / 6, 1 / 6, -1 / 6, 1 / 6), spec)
    assert 9.85 < total < 10.0
    assert 10.0 - total <= inner
    # real roots beyond |x| = 6 mirror those inside |x| < 1/6 and already exceed 0.05
    assert line_integral_g(fam, -1 / 6, 1 / 6) > 0.05


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=str)
def test_stokes_consistency_on_random_rectangles(fam):
    rng = np.random.default_rng(21)
    for _ in range(3):
        x0, y0 = rng.uniform(-2, 1), rng.uniform(0.05, 1)
        w = Window(x0, x0 + rng.uniform(0.2, 1), y0, y0 + rng.uniform(0.2, 1))
        c = expected_zeros_contour(fam, w)
        a = expected_zeros_area(fam, w)
        assert abs(c - a) <= max(1e-4, 1e-3 * a)


def test_cosine_windows_crossing_the_imaginary_axis():
    fam = family("cosine", 10)
    assert vertical_lines(fam, -4, 4) == [-math.pi, 0.0, math.pi]
    w = Window(-1.0, 1.0, 0.3, 1.2)
    assert expected_zeros_contour(fam, w) == pytest.approx(expected_zeros_area(fam, w), rel=1e-4)


def test_additivity():
    fam = family("taylor", 10)
    left, right, whole = Window(-1, 0.5, 0.2, 1.5), Window(0.5, 2, 0.2, 1.5), Window(-1, 2, 0.2, 1.5)
    spec = QuadratureSpec(grid_nx=128, grid_ny=128)
    double = QuadratureSpec(grid_nx=256, grid_ny=128)
    parts = area_integral_h(fam, left, spec) + area_integral_h(fam, right, spec)
    assert parts == pytest.approx(area_integral_h(fam, whole, double), abs=1e-6)


def test_midpoint_refinement_is_second_order():
    fam = family("weyl", 10)
    w = Window(-1.3, 0.9, 0.1, 1.7)
    vals = [area_integral_h(fam, w, QuadratureSpec(grid_nx=k, grid_ny=k)) for k in (32, 64, 128)]
    d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
    assert d1 >= 3 * d2


def test_contour_on_the_axis_is_rejected():
    with pytest.raises(ContourTooCloseToAxis):
        expected_zeros_contour(family("power", 5), Window(-1, 1, 0.0, 1.0))
    with pytest.raises(ContourTooCloseToAxis):
        expected_zeros_contour(family("power", 5), Window(-1, 1, 1e-12, 1.0))


def test_area_rule_displaces_axis_cells_instead_of_failing():
    fam = family("power", 5)
    w = Window(-1, 1, 0.0, 1.0)
    assert np.isfinite(area_integral_h(fam, w, QuadratureSpec(grid_nx=33, grid_ny=33)))


@pytest.mark.parametrize("bounds", [(1, 0, 0, 1), (0, 1, 1, 1), (0, math.inf, 0, 1)])
def test_window_validation(bounds):
    with pytest.raises(ValidationError):
        Window(*bounds)


def test_quadrature_spec_validation():
    with pytest.raises(ValidationError):
        QuadratureSpec(nodes_per_side=4)
    with pytest.raises(ValidationError):
        QuadratureSpec(grid_nx=16)
    with pytest.raises(ValidationError):
        QuadratureSpec(axis_nodes=10)
