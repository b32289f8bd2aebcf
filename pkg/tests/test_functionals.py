"""Functional-layer tests: constants, profile ratios, combiners, concentration.

Closed expressions are compared against their defining arithmetic, the
quadrature ratio against the closed ratio, and every tested ratio against the
strict upper constant.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hyperex.extension import ExpProfile
from hyperex.functionals import (
    SUPPORTED_PAIRS,
    TWO_SHEET_FACTORS,
    base_constant,
    best_constant,
    combiner_gap,
    constant_expression,
    conv_form_constant,
    expected_monotonicity,
    mass_fraction,
    monotonicity_scan,
    q_ratio_closed,
    q_ratio_quadrature,
    richardson_limit,
    scaling_exponent,
    scaling_check,
    sup_norm_bound,
    two_sheeted_combiner_check,
)
from hyperex.geometry import HyperboloidParams
from hyperex.quadrature import QuadResult


def test_one_sheet_constants_closed_values():
    assert best_constant(2, 4).value == pytest.approx(2.0 ** 0.75 * math.pi, rel=1e-15)
    assert best_constant(2, 6).value == pytest.approx(
        (2.0 * math.pi) ** (5.0 / 6.0), rel=1e-15
    )
    assert best_constant(3, 4).value == pytest.approx(
        (2.0 * math.pi) ** 1.25, rel=1e-15
    )


def test_two_sheet_factors():
    assert TWO_SHEET_FACTORS[(2, 4)] == pytest.approx(1.5 ** 0.25, rel=1e-15)
    assert TWO_SHEET_FACTORS[(2, 6)] == pytest.approx(2.5 ** (1.0 / 3.0), rel=1e-15)
    assert TWO_SHEET_FACTORS[(3, 4)] == pytest.approx(1.5 ** 0.25, rel=1e-15)
    # The cube-combiner factor written two ways.
    assert (25.0 / 4.0) ** (1.0 / 6.0) == pytest.approx(
        (5.0 / 2.0) ** (1.0 / 3.0), abs=1e-15
    )
    for d, p in SUPPORTED_PAIRS:
        two = best_constant(d, p, sheet="two").value
        one = best_constant(d, p).value
        assert two == pytest.approx(one * TWO_SHEET_FACTORS[(d, p)], rel=1e-14)


def test_scaling_exponents():
    assert scaling_exponent(2, 4) == pytest.approx(-0.25)
    assert scaling_exponent(2, 6) == pytest.approx(0.0)
    assert scaling_exponent(3, 4) == pytest.approx(0.0)


def test_constant_s_dependence():
    # Only (2, 4) carries an s power: s^{-1/4}.
    for s in (0.25, 1.0, 4.0):
        assert best_constant(2, 4, s).value == pytest.approx(
            2.0 ** 0.75 * math.pi * s ** -0.25, rel=1e-14
        )
        assert best_constant(2, 6, s).value == pytest.approx(
            best_constant(2, 6).value, rel=1e-14
        )
        assert best_constant(3, 4, s).value == pytest.approx(
            best_constant(3, 4).value, rel=1e-14
        )


def test_constant_validation():
    with pytest.raises(ValueError):
        best_constant(2, 5)
    with pytest.raises(ValueError):
        best_constant(3, 6)
    with pytest.raises(ValueError):
        best_constant(2, 4, s=-1.0)
    with pytest.raises(ValueError):
        best_constant(2, 4, sheet="both")


def test_constant_expressions_evaluate():
    for d, p in SUPPORTED_PAIRS:
        for sheet in ("one", "two"):
            expr = constant_expression(d, p, sheet)
            val = eval(
                expr.replace("^", "**"), {"__builtins__": {}}, {"pi": math.pi}
            )
            assert val == pytest.approx(best_constant(d, p, 1.0, sheet).value,
                                        rel=1e-14)


def test_sup_norm_sandwich_saturates():
    for d, p in SUPPORTED_PAIRS:
        for s in (0.5, 1.0, 2.0):
            assert sup_norm_bound(d, p, s) == pytest.approx(
                best_constant(d, p, s).value, rel=1e-14
            )


def test_conv_form_constants():
    assert conv_form_constant(2, 2) == pytest.approx(math.pi ** 0.25, rel=1e-14)
    assert conv_form_constant(2, 3) == pytest.approx(
        (2.0 * math.pi) ** (1.0 / 3.0), rel=1e-14
    )
    assert conv_form_constant(3, 2) == pytest.approx(
        (2.0 * math.pi) ** 0.25, rel=1e-14
    )


def test_q_ratio_closed_small_a_margin():
    # Q_{2,6}^6/(2 pi)^5 = 1 - 6z - 36 z^2 e^{6z} Ei(-6z), z = a s.
    q = q_ratio_closed(2, 6, 1e-3, 1.0)
    h = best_constant(2, 6).value
    assert q ** 6 / (2.0 * math.pi) ** 5 == pytest.approx(0.9941645963831258,
                                                          rel=1e-12)
    assert 0.997 <= q / h < 1.0


def test_q_ratio_closed_large_a_margin():
    q = q_ratio_closed(2, 4, 100.0, 1.0)
    h = best_constant(2, 4).value
    assert 0.999 <= q / h < 1.0
    # Q^4 s/(8 pi^4) = -4z e^{4z} Ei(-4z) ~ 1 - 1/(4z) + 1/(8 z^2), so the
    # margin is Q/H ~ 1 - 1/(16 z) + 13/(512 z^2).
    z = 100.0
    assert q / h == pytest.approx(1.0 - 1.0 / (16.0 * z), abs=3e-6)


def test_q_ratio_closed_rejects_d3():
    with pytest.raises(ValueError):
        q_ratio_closed(3, 4, 1.0, 1.0)
    with pytest.raises(ValueError):
        q_ratio_closed(2, 4, 0.0, 1.0)


def test_q_ratio_quadrature_matches_closed_d2():
    for p in (4, 6):
        closed = q_ratio_closed(2, p, 1.0, 1.0)
        numeric = q_ratio_quadrature(2, p, 1.0, 1.0)
        assert numeric.value == pytest.approx(closed, rel=1e-6)


def test_q_ratio_quadrature_d3_limit():
    q = q_ratio_quadrature(3, 4, 1e-2, 1.0)
    h = best_constant(3, 4).value
    assert 0.95 <= q.value / h < 1.0


def test_q_below_constant_everywhere():
    # The computational face of nonexistence of extremizers: strict gap at
    # every finite rate, beyond the method error.
    for d, p in SUPPORTED_PAIRS:
        h = best_constant(d, p).value
        for a in np.geomspace(1e-3, 1e2, 25):
            if d == 2:
                q, tol = q_ratio_closed(d, p, float(a), 1.0), 1e-12
            else:
                r = q_ratio_quadrature(d, p, float(a), 1.0)
                q, tol = r.value, r.error
            assert q < h - tol


def test_monotonicity_scans_200_points():
    grid = np.geomspace(1e-3, 1e2, 200)
    pts, verdict = monotonicity_scan(2, 6, 1.0, grid)
    assert verdict == "strictly-decreasing"
    assert expected_monotonicity(2, 6) == "decreasing"
    assert pts[0].q_value < best_constant(2, 6).value
    pts, verdict = monotonicity_scan(2, 4, 1.0, grid)
    assert verdict == "strictly-increasing"
    assert expected_monotonicity(2, 4) == "increasing"


def test_monotonicity_scan_degenerate_grid():
    pts, verdict = monotonicity_scan(2, 4, 1.0, [1.0, 2.0])
    assert len(pts) == 2
    assert verdict == "strictly-increasing"
    assert pts[1].q_value > pts[0].q_value


def test_monotonicity_scan_validation():
    with pytest.raises(ValueError):
        monotonicity_scan(2, 4, 1.0, [1.0])
    with pytest.raises(ValueError):
        monotonicity_scan(2, 4, 1.0, [2.0, 1.0])


def test_scaling_check_closed_pairs():
    prof = ExpProfile(a=1.3, params=HyperboloidParams(d=2, s=1.0))
    for p in (4, 6):
        for s in (0.5, 2.3):
            assert scaling_check(2, p, s, prof) < 1e-10


def test_scaling_check_d3_quadrature():
    prof = ExpProfile(a=0.2, params=HyperboloidParams(d=3, s=1.0))
    assert scaling_check(3, 4, 2.0, prof) < 1e-8


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.0, 1e6), y=st.floats(0.0, 1e6))
def test_combiner_gap_identity(x, y):
    gap = float(combiner_gap(x, y))
    assert gap == pytest.approx(0.5 * (x - y) ** 2, abs=1e-9 * (1 + x + y) ** 2)
    assert gap >= -1e-12 * (1 + x + y) ** 2


def test_combiner_equality_on_diagonal():
    assert float(combiner_gap(1.0, 1.0)) == 0.0
    # X = Y = 1: both sides equal 6.
    assert 1.0 + 1.0 + 4.0 == pytest.approx(1.5 * 4.0)


def test_combiner_check_million_samples():
    assert two_sheeted_combiner_check(10 ** 6, seed=7) == 0


def test_combiner_check_deterministic():
    a = two_sheeted_combiner_check(10 ** 4, seed=3)
    b = two_sheeted_combiner_check(10 ** 4, seed=3)
    assert a == b == 0


def test_mass_fraction_worked_value():
    # 1 - e^{-2 a (sqrt(s^2 + R^2) - s)} at d=2, s=1, a=1e-3, R=10.
    got = mass_fraction(2, 1.0, 1e-3, 10.0)
    want = -math.expm1(-2e-3 * (math.sqrt(101.0) - 1.0))
    assert got == pytest.approx(want, rel=1e-14)
    assert got == pytest.approx(0.0179, abs=5e-4)


def test_mass_fraction_closed_vs_quadrature_d2():
    a, s, radius = 0.7, 1.0, 3.0
    u_ball = math.hypot(s, radius)
    inner, _ = quad(lambda u: math.exp(-2 * a * u), s, u_ball)
    outer, _ = quad(lambda u: math.exp(-2 * a * u), s, s + 80.0)
    assert mass_fraction(2, s, a, radius) == pytest.approx(inner / outer, rel=1e-9)


def test_mass_fraction_limits():
    assert mass_fraction(2, 1.0, 100.0, 1.0) > 0.999
    assert mass_fraction(2, 1.0, 1e-6, 1.0) < 1e-5
    assert mass_fraction(3, 1.0, 100.0, 1.0) > 0.999
    assert mass_fraction(3, 1.0, 1e-4, 1.0) < 1e-3


def test_mass_fraction_monotone_in_radius_and_rate():
    radii = np.linspace(0.5, 8.0, 12)
    vals = [mass_fraction(2, 1.0, 0.3, float(r)) for r in radii]
    assert np.all(np.diff(vals) > 0)
    rates = np.geomspace(1e-2, 10.0, 12)
    vals = [mass_fraction(3, 1.0, float(a), 2.0) for a in rates]
    assert np.all(np.diff(vals) > 0)


def test_mass_fraction_validation():
    with pytest.raises(ValueError):
        mass_fraction(4, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        mass_fraction(2, 1.0, -1.0, 1.0)


def test_richardson_limit_cancels_linear_term():
    # f(h) = L + c h + O(h^2 log h) around h = 0 for the (2, 6) ratio.
    f = lambda h: q_ratio_closed(2, 6, h, 1.0)
    r = richardson_limit(f, 1e-3)
    h = best_constant(2, 6).value
    assert isinstance(r, QuadResult)
    assert abs(r.value - h) < r.error
    assert abs(r.value - h) < 10.0 * abs(f(1e-3) - h) * 0.01


def test_richardson_validation():
    with pytest.raises(ValueError):
        richardson_limit(lambda h: h, 0.0)
