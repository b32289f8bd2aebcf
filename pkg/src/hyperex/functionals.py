"""Sharp constants, profile functionals, sheet combiners, and concentration.

Everything here sits on top of the closed formulas from the measure and
extension layers.  The three supported (dimension, exponent) pairs are
(2, 4), (2, 6), (3, 4); their one-sheet constants are

    2^{3/4} pi,   (2 pi)^{5/6},   (2 pi)^{5/4},

scaled by s^{(d-1)/2 - (d+1)/p} for a general hyperboloid parameter, and by
(3/2)^{1/4} or (5/2)^{1/3} when both sheets carry mass.  The profile ratio

    Q(a) = ||T f_a||_p / ||f_a||_2

stays strictly below the constant for every finite rate a and attains it
only in a concentration limit: a -> oo (vertex) for (2, 4), a -> 0+
(spatial infinity) for (2, 6) and (3, 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad as _scipy_quad

from .extension import ExpProfile, l2_norm_sq, lp_norm_extension_via_conv
from .geometry import HyperboloidParams
from .measures import ConvClosedForm, conv_sup_norm
from .quadrature import QuadResult, QuadSpec

SUPPORTED_PAIRS = ((2, 4), (2, 6), (3, 4))
SHEET_LABELS = ("one", "two")

# Factor linking the two-sheet constant to the one-sheet constant; the square
# combiner (p = 4) gives (3/2)^{1/4} and the cubic combiner (p = 6) gives
# (25/4)^{1/6} = (5/2)^{1/3}.
TWO_SHEET_FACTORS = {
    (2, 4): 1.5 ** 0.25,
    (2, 6): 2.5 ** (1.0 / 3.0),
    (3, 4): 1.5 ** 0.25,
}


@dataclass(frozen=True)
class SharpConstant:
    """Best constant for one (d, p, s, sheet) choice."""

    d: int
    p: int
    s: float
    value: float
    sheet: str


@dataclass(frozen=True)
class FunctionalCurvePoint:
    """One point of the profile-ratio curve a -> Q(a)."""

    a: float
    q_value: float
    method: str


def scaling_exponent(d: int, p: int) -> float:
    """Power of s carried by the best constant: (d-1)/2 - (d+1)/p."""
    return 0.5 * (d - 1) - (d + 1) / p


def _require_pair(d: int, p: int) -> None:
    if (d, p) not in SUPPORTED_PAIRS:
        raise ValueError(f"unsupported pair (d, p) = ({d}, {p})")


def base_constant(d: int, p: int) -> float:
    """One-sheet constant at s = 1."""
    _require_pair(d, p)
    if (d, p) == (2, 4):
        return 2.0 ** 0.75 * math.pi
    if (d, p) == (2, 6):
        return (2.0 * math.pi) ** (5.0 / 6.0)
    return (2.0 * math.pi) ** 1.25


def constant_expression(d: int, p: int, sheet: str = "one") -> str:
    """Human-readable closed expression for the constant at s = 1."""
    _require_pair(d, p)
    core = {
        (2, 4): "2^(3/4)*pi",
        (2, 6): "(2*pi)^(5/6)",
        (3, 4): "(2*pi)^(5/4)",
    }[(d, p)]
    if sheet == "one":
        return core
    prefix = "(3/2)^(1/4)" if p == 4 else "(5/2)^(1/3)"
    return f"{prefix}*{core}"


def best_constant(d: int, p: int, s: float = 1.0, sheet: str = "one") -> SharpConstant:
    """Sharp constant for ||T f||_p <= C ||f||_2 on the scaled hyperboloid."""
    _require_pair(d, p)
    if sheet not in SHEET_LABELS:
        raise ValueError(f"sheet must be one of {SHEET_LABELS}")
    if not s > 0:
        raise ValueError("s must be positive")
    value = s ** scaling_exponent(d, p) * base_constant(d, p)
    if sheet == "two":
        value *= TWO_SHEET_FACTORS[(d, p)]
    return SharpConstant(d=d, p=p, s=float(s), value=value, sheet=sheet)


def conv_form_constant(d: int, k: int) -> float:
    """Best constant in convolution form: sup ||(f sigma)^{*k}||_2^{1/k}/||f||_2.

    Equals best_constant / (2 pi)^{(d+1)/(2k)}; closed values are pi^{1/4}
    for (d, k) = (2, 2), (2 pi)^{1/3} for (2, 3), (2 pi)^{1/4} for (3, 2).
    """
    h = best_constant(d, 2 * k, 1.0, "one").value
    return h / (2.0 * math.pi) ** ((d + 1) / (2.0 * k))


def sup_norm_bound(d: int, p: int, s: float = 1.0) -> float:
    """Upper bound (2 pi)^{(d+1)/p} ||sigma^{*k}||_oo^{1/p} with k = p/2.

    Coincides with the sharp constant for all three supported pairs: the
    closed sup-norms make the bound saturate.
    """
    _require_pair(d, p)
    k = p // 2
    sup, _ = conv_sup_norm(ConvClosedForm(d, k, s))
    return (2.0 * math.pi) ** ((d + 1) / p) * sup ** (1.0 / p)


def q_ratio_closed(d: int, p: int, a: float, s: float) -> float:
    """Closed profile ratio Q = ||T f_a||_p / ||f_a||_2; d = 2 only.

    Q_{2,4}^4 = 8 (pi^4 / s) (-4 a s e^{4as} Ei(-4as))
    Q_{2,6}^6 = (2 pi)^5 (1 - 6 a s - 36 (a s)^2 e^{6as} Ei(-6as))

    written with the scaled e^x Ei(-x) so the a s -> oo regime keeps full
    precision.
    """
    from .specfun import exp_scaled_ei

    _require_pair(d, p)
    if d != 2:
        raise ValueError("no closed ratio for d = 3; use q_ratio_quadrature")
    if not (a > 0 and s > 0):
        raise ValueError("a and s must be positive")
    z = a * s
    if p == 4:
        q4 = 8.0 * math.pi ** 4 / s * (-4.0 * z * exp_scaled_ei(4.0 * z))
        return q4 ** 0.25
    q6 = (2.0 * math.pi) ** 5 * (1.0 - 6.0 * z - 36.0 * z * z * exp_scaled_ei(6.0 * z))
    return q6 ** (1.0 / 6.0)


def q_ratio_quadrature(
    d: int, p: int, a: float, s: float, quad: QuadSpec = QuadSpec()
) -> QuadResult:
    """Profile ratio through the quadrature convolution route; any pair.

    For (3, 4) this is the only route.  The error estimate is propagated
    from the norm quadrature.
    """
    _require_pair(d, p)
    profile = ExpProfile(a=a, params=HyperboloidParams(d=d, s=s))
    norm = lp_norm_extension_via_conv(profile, p, method="quadrature", quad=quad)
    f_norm = math.sqrt(l2_norm_sq(profile))
    return QuadResult(value=norm.value / f_norm, error=norm.error / f_norm)


def expected_monotonicity(d: int, p: int) -> str | None:
    """Known strict monotonicity of a -> Q(a): only the d = 2 pairs."""
    if (d, p) == (2, 6):
        return "decreasing"
    if (d, p) == (2, 4):
        return "increasing"
    return None


def monotonicity_scan(
    d: int, p: int, s: float, a_grid
) -> tuple[list[FunctionalCurvePoint], str]:
    """Evaluate Q on the grid and classify the trend.

    Returns the curve and one of "strictly-increasing", "strictly-decreasing",
    "not-strict".  The grid must be strictly increasing with >= 3 points for
    a meaningful verdict (>= 2 accepted for degenerate sweeps).
    """
    _require_pair(d, p)
    grid = np.asarray(a_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("a_grid must be a 1-D grid with at least 2 points")
    if not np.all(np.diff(grid) > 0):
        raise ValueError("a_grid must be strictly increasing")
    if d == 2:
        points = [
            FunctionalCurvePoint(a=float(a), q_value=q_ratio_closed(d, p, float(a), s),
                                 method="closed")
            for a in grid
        ]
    else:
        points = [
            FunctionalCurvePoint(
                a=float(a), q_value=q_ratio_quadrature(d, p, float(a), s).value,
                method="quadrature")
            for a in grid
        ]
    values = np.array([pt.q_value for pt in points])
    steps = np.diff(values)
    if np.all(steps > 0):
        verdict = "strictly-increasing"
    elif np.all(steps < 0):
        verdict = "strictly-decreasing"
    else:
        verdict = "not-strict"
    return points, verdict


def scaling_check(d: int, p: int, s: float, profile: ExpProfile) -> float:
    """Relative discrepancy of Q(a/s, s) = s^{exponent} Q(a, 1).

    The rescaled profile of rate a on the unit hyperboloid has rate a/s on
    the s-hyperboloid (the product a s is the scale-invariant coordinate).
    Closed forms for d = 2, quadrature route for (3, 4).
    """
    _require_pair(d, p)
    if profile.params.d != d:
        raise ValueError("profile dimension does not match d")
    if not s > 0:
        raise ValueError("s must be positive")
    a = profile.a
    factor = s ** scaling_exponent(d, p)
    if d == 2:
        lhs = q_ratio_closed(d, p, a / s, s)
        rhs = factor * q_ratio_closed(d, p, a, 1.0)
    else:
        lhs = q_ratio_quadrature(d, p, a / s, s).value
        rhs = factor * q_ratio_quadrature(d, p, a, 1.0).value
    return abs(lhs - rhs) / abs(rhs)


def combiner_gap(x, y):
    """Slack of the square-sheet combiner X^2 + Y^2 + 4XY <= (3/2)(X+Y)^2.

    Algebraically equal to (X - Y)^2 / 2, so it is nonnegative and vanishes
    exactly on the diagonal.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 1.5 * (x + y) ** 2 - (x * x + y * y + 4.0 * x * y)


def two_sheeted_combiner_check(samples: int, seed: int | None = None) -> int:
    """Count violations of the square combiner over random nonnegative pairs.

    A violation is either a negative gap (inequality broken) or a gap
    inconsistent with equality holding iff X = Y.  Returns the count, which
    the sharp-inequality suite requires to be zero.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(0 if seed is None else seed)
    x = rng.exponential(size=samples)
    y = rng.exponential(size=samples)
    # Include exact diagonal pairs so the equality case is exercised.
    x[: samples // 100 + 1] = y[: samples // 100 + 1]
    gap = combiner_gap(x, y)
    ident = 0.5 * (x - y) ** 2
    scale = (1.0 + x + y) ** 2
    broken = gap < -1e-12 * scale
    mismatched = np.abs(gap - ident) > 1e-12 * scale
    equality_wrong = (np.abs(gap) <= 1e-15 * scale) & (np.abs(x - y) > 1e-7 * (1 + x + y))
    return int(np.sum(broken | mismatched | equality_wrong))


def mass_fraction(d: int, s: float, a: float, radius: float) -> float:
    """Share of ||f_a||^2 carried by the centered ball of the given radius.

    d = 2 closed: 1 - e^{-2a(sqrt(s^2 + R^2) - s)}; d = 3 by quadrature of
    the radial density e^{-2au} sqrt(u^2 - s^2) in the energy variable.
    Small for small a (mass escapes to spatial infinity), near 1 for large
    a (mass pins to the vertex).
    """
    if d not in (2, 3):
        raise ValueError("d must be 2 or 3")
    if not (s > 0 and a > 0 and radius > 0):
        raise ValueError("s, a, radius must be positive")
    u_ball = math.hypot(s, radius)
    if d == 2:
        return -math.expm1(-2.0 * a * (u_ball - s))

    def dens(u: float) -> float:
        return math.exp(-2.0 * a * u) * math.sqrt(u * u - s * s)

    inner, _ = _scipy_quad(dens, s, u_ball, limit=200)
    outer, _ = _scipy_quad(dens, u_ball, u_ball + 60.0 / a, limit=200)
    return inner / (inner + outer)


def richardson_limit(f, h: float) -> QuadResult:
    """First-order Richardson extrapolation of f(h) as h -> 0.

    Combines f(h) and f(h/2) to cancel the O(h) term; the error estimate is
    the size of the cancelled step, a conservative bound when the expansion
    is genuinely first order.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    coarse = f(h)
    fine = f(0.5 * h)
    return QuadResult(value=2.0 * fine - coarse, error=abs(fine - coarse))
