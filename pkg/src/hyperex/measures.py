"""Surface measures on the hyperboloid sheets and their convolution powers.

The Lorentz-invariant measure on the upper sheet integrates as
int f d(sigma) = int f(y, psi(y)) dy / psi(y); the lower sheet is its
reflection tau -> -tau; "both" is the sum.

Closed forms for the n-fold auto-convolution of the upper-sheet measure exist
exactly for (d, n) in {(2, 2), (2, 3), (3, 2)}; each is a function of the
invariant m^2 = tau^2 - |xi|^2 supported on {tau >= sqrt((n s)^2 + |xi|^2)}:

    d=2, n=2 : 2 pi / sqrt(m^2)               sup pi/s, attained at the vertex
    d=2, n=3 : (2 pi)^2 (1 - 3 s / sqrt(m^2)) sup (2 pi)^2, at timelike infinity
    d=3, n=2 : 2 pi sqrt(1 - 4 s^2 / m^2)     sup 2 pi, at timelike infinity

Two numerical oracles cross-check them without reusing their algebra:

  * conv_point_oracle reduces a point to normal form, re-boosts to an off-axis
    canonical representative, finds the admissible chord of the bipolar
    parametrization by bisection on the support predicates, and integrates
    the delta-resolved density along the chord (d = 2) or reads off the chord
    length (d = 3, where the bipolar density is constant).
  * conv_pairing_oracle integrates a test function against the n-fold
    convolution as an integral over n copies of the sheet: tensor
    Gauss-Legendre for n = 2, importance-sampled Monte Carlo for n = 3
    (d = 2), where in the coordinates (u = psi(y), theta) the measure is
    exactly du d(theta) and u - s can be sampled as a unit exponential.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import HyperboloidParams, SpacetimePoint, boost, energy, normal_form
from .quadrature import BudgetError, QuadResult, QuadSpec, gl_nodes, trapezoid_angles

SHEETS = ("plus", "minus", "both")

CLOSED_PAIRS = ((2, 2), (2, 3), (3, 2))


@dataclass(frozen=True)
class MeasureSpec:
    params: HyperboloidParams
    sheet: str = "plus"

    def __post_init__(self) -> None:
        if self.sheet not in SHEETS:
            raise ValueError(f"sheet must be one of {SHEETS}")


@dataclass(frozen=True)
class ConvClosedForm:
    """Closed n-fold convolution of the upper-sheet measure, (d, n) limited."""

    d: int
    n: int
    s: float

    def __post_init__(self) -> None:
        if (self.d, self.n) not in CLOSED_PAIRS:
            raise ValueError(
                f"no closed convolution form for (d, n) = ({self.d}, {self.n}); "
                f"supported: {CLOSED_PAIRS}"
            )
        if not self.s > 0:
            raise ValueError("s must be positive")

    @property
    def params(self) -> HyperboloidParams:
        return HyperboloidParams(d=self.d, s=self.s)


def _sheet_nodes(params: HyperboloidParams, quad: QuadSpec):
    """Quadrature nodes (xi, tau, w) for the upper sheet, radius-truncated.

    Returned as flat arrays; the radial range is split at radius/2 so the
    outer half doubles as a truncation-tail estimate.
    """
    half = 0.5 * quad.radius
    r1, w1 = gl_nodes(0.0, half, quad.n_radial)
    r2, w2 = gl_nodes(half, quad.radius, quad.n_radial)
    r = np.concatenate([r1, r2])
    wr = np.concatenate([w1, w2])
    outer = np.concatenate([np.zeros_like(w1, dtype=bool), np.ones_like(w2, dtype=bool)])
    psi = energy(params, r)
    if params.d == 2:
        theta, wt = trapezoid_angles(quad.n_angular)
        rr = np.repeat(r, theta.size)
        ww = np.repeat((r / psi) * wr, theta.size) * np.tile(wt, r.size)
        tt = np.tile(theta, r.size)
        xi = np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=1)
        tail = np.repeat(outer, theta.size)
        return xi, energy(params, rr), ww, tail
    n_polar = max(8, quad.n_angular // 2)
    theta, wt = trapezoid_angles(quad.n_angular)
    c, wc = gl_nodes(-1.0, 1.0, n_polar)  # cos of the polar angle
    rr = np.repeat(r, c.size * theta.size)
    cc = np.tile(np.repeat(c, theta.size), r.size)
    tt = np.tile(theta, r.size * c.size)
    sin_pol = np.sqrt(1.0 - cc**2)
    xi = np.stack(
        [rr * sin_pol * np.cos(tt), rr * sin_pol * np.sin(tt), rr * cc], axis=1
    )
    ww = (
        np.repeat((r * r / psi) * wr, c.size * theta.size)
        * np.tile(np.repeat(wc, theta.size), r.size)
        * np.tile(wt, r.size * c.size)
    )
    tail = np.repeat(outer, c.size * theta.size)
    return xi, energy(params, rr), ww, tail


def surface_integral(
    spec: MeasureSpec, f: Callable, quad: QuadSpec = QuadSpec()
) -> QuadResult:
    """int f d(sigma) over the requested sheet(s).

    f must be vectorized: f(xi, tau) with xi of shape (N, d) and tau of shape
    (N,) returning (N,).  Raises BudgetError when the outer radial half
    contributes more than the requested tolerance allows, i.e. the truncation
    radius is too small for this integrand.
    """

    def run(scale: int) -> tuple[float, float]:
        q = QuadSpec(
            rule=quad.rule,
            radius=quad.radius,
            n_radial=quad.n_radial * scale,
            n_angular=quad.n_angular * scale,
            samples=quad.samples,
            seed=quad.seed,
            rtol=quad.rtol,
            atol=quad.atol,
        )
        xi, tau, w, tail = _sheet_nodes(spec.params, q)
        total = 0.0
        tail_part = 0.0
        if spec.sheet in ("plus", "both"):
            vals = w * np.asarray(f(xi, tau), dtype=float)
            total += float(np.sum(vals))
            tail_part += float(np.sum(np.abs(vals[tail])))
        if spec.sheet in ("minus", "both"):
            vals = w * np.asarray(f(xi, -tau), dtype=float)
            total += float(np.sum(vals))
            tail_part += float(np.sum(np.abs(vals[tail])))
        return total, tail_part

    coarse, _ = run(1)
    fine, tail = run(2)
    floor = max(quad.rtol * abs(fine), quad.atol)
    if tail > max(100.0 * floor, 1e-3 * abs(fine)):
        raise BudgetError(
            f"outer-half contribution {tail:.3e} vs total {fine:.3e}: "
            f"integrand decays too slowly for radius {quad.radius}"
        )
    return QuadResult(value=fine, error=abs(fine - coarse))


def _invariant_m2(xi, tau):
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if xi.ndim == 1 and tau.ndim == 0:
        return tau**2 - np.dot(xi, xi), tau
    return tau**2 - np.sum(xi * xi, axis=-1), tau


def conv_closed(form: ConvClosedForm, xi, tau):
    """Closed n-fold convolution density at (xi, tau); 0 outside the support.

    Vectorized: xi may be (N, d) with tau (N,).  The support condition is the
    closed set tau >= sqrt((n s)^2 + |xi|^2).
    """
    m2, t = _invariant_m2(xi, tau)
    thresh = (form.n * form.s) ** 2
    inside = (t > 0) & (m2 >= thresh)
    m2_safe = np.where(inside, m2, 1.0)
    if form.d == 2 and form.n == 2:
        vals = 2.0 * np.pi / np.sqrt(m2_safe)
    elif form.d == 2 and form.n == 3:
        vals = (2.0 * np.pi) ** 2 * (1.0 - 3.0 * form.s / np.sqrt(m2_safe))
    else:  # (3, 2)
        vals = 2.0 * np.pi * np.sqrt(1.0 - 4.0 * form.s**2 / m2_safe)
    out = np.where(inside, vals, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def conv_sup_norm(form: ConvClosedForm) -> tuple[float, str]:
    """Supremum of the closed convolution density and where it is approached.

    "vertex" means attained at the support vertex (0, n s); "infinity" means a
    strict supremum approached along timelike infinity.
    """
    if form.d == 2 and form.n == 2:
        return np.pi / form.s, "vertex"
    if form.d == 2 and form.n == 3:
        return (2.0 * np.pi) ** 2, "infinity"
    return 2.0 * np.pi, "infinity"


def _chord_halfwidth(s: float, xi_norm: float, tau: float) -> float:
    """Bisection for the admissible chord endpoint of the bipolar coordinates.

    On the line u + v = tau (both factors at energies u, v >= s) the pair of
    spatial radii rho = sqrt(u^2 - s^2), zeta = sqrt(v^2 - s^2) must satisfy
    the triangle conditions rho + zeta >= |xi| and |rho - zeta| <= |xi|.
    The admissible set in t = u - v is an interval [-t*, t*]; the predicate
    is true at t = 0 for interior points and false at t = tau - 2s.
    """

    # Extended precision: near the support boundary the predicate margins sink
    # to ~ (m^2 - 4 s^2), and double rounding would shift the bisection root.
    s_l = np.longdouble(s)
    xi_l = np.longdouble(xi_norm)
    tau_l = np.longdouble(tau)

    def admissible(t) -> bool:
        u = 0.5 * (tau_l + t)
        v = 0.5 * (tau_l - t)
        if u < s_l or v < s_l:
            return False
        rho = np.sqrt(max(u * u - s_l * s_l, np.longdouble(0.0)))
        zeta = np.sqrt(max(v * v - s_l * s_l, np.longdouble(0.0)))
        return (rho + zeta >= xi_l) and (abs(rho - zeta) <= xi_l)

    lo, hi = np.longdouble(0.0), tau_l - 2.0 * s_l
    if not admissible(lo):
        raise ValueError("point is not in the open support")
    if admissible(hi):
        return float(hi)
    for _ in range(110):
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


# Velocity of the canonical off-axis representative used by the point oracle;
# any value in (0, 1) works, this one keeps the numbers rational.
_CANONICAL_VELOCITY = 0.6


def conv_point_oracle(
    form: ConvClosedForm, xi, tau: float, quad: QuadSpec = QuadSpec()
) -> QuadResult:
    """Numerical n = 2 convolution density at one point, without the closed form.

    The point is reduced to (0, m) by normal_form, then re-boosted to the
    canonical representative (0.75 m, 0, ..., 1.25 m) so the bipolar
    parametrization is exercised off-axis.  Only the measure definition is
    shared with conv_closed; the chord endpoint comes from bisection on the
    support predicates and the d = 2 chord integral is done by Gauss-Legendre
    after a sin substitution that absorbs the inverse-square-root endpoints.
    """
    if form.n != 2:
        raise ValueError(
            "point oracle covers n = 2 only; use conv_pairing_oracle for n = 3"
        )
    params = form.params
    s = form.s
    xi = np.asarray(xi, dtype=float)
    p = SpacetimePoint(xi, float(tau))
    m2 = p.tau**2 - float(np.dot(p.xi, p.xi))
    if p.tau <= 0 or m2 <= (2.0 * s) ** 2:
        return QuadResult(0.0, 0.0)
    if m2 - (2.0 * s) ** 2 < 1e-8 * (1.0 + p.tau**2):
        warnings.warn(
            "point is within 1e-8 (1 + tau^2) of the support boundary; "
            "the oracle loses accuracy there",
            stacklevel=2,
        )
    _, m = normal_form(params, p)
    rep = boost(params.d, _CANONICAL_VELOCITY).apply(
        SpacetimePoint(np.zeros(params.d), m)
    )
    xq = float(np.linalg.norm(rep.xi))
    tq = rep.tau
    t_star = _chord_halfwidth(s, xq, tq)
    if form.d == 3:
        # The bipolar density is constant on the chord: value = 2 pi t*/|xi|.
        width = (tq - 2.0 * s) * 2.0**-90
        return QuadResult(
            value=2.0 * np.pi * t_star / xq,
            error=2.0 * np.pi * max(width, 1e-15 * t_star) / xq,
        )

    def chord_integral(n_nodes: int) -> float:
        phi, w = gl_nodes(-0.5 * np.pi, 0.5 * np.pi, n_nodes)
        # Extended precision: near the boundary both factors below are tiny
        # differences of order-one squares, outside double's reach at the
        # outermost nodes.
        t = np.longdouble(t_star) * np.sin(phi.astype(np.longdouble))
        u = 0.5 * (np.longdouble(tq) + t)
        v = 0.5 * (np.longdouble(tq) - t)
        s2 = np.longdouble(s) ** 2
        x2 = np.longdouble(xq) ** 2
        rho = np.sqrt(u * u - s2)
        zeta = np.sqrt(v * v - s2)
        fac = ((rho + zeta) ** 2 - x2) * (x2 - (rho - zeta) ** 2)
        # Strictly positive on the open chord; a sign flip is rounding noise
        # at a node hugging an endpoint unless it happens en masse.
        if np.count_nonzero(fac <= 0) > max(2, n_nodes // 50):
            raise RuntimeError("chord parametrization failed; point degenerate?")
        fac = np.abs(fac)
        # d(t) = t* cos(phi) d(phi); the 1/sqrt endpoint of the chord density
        # cancels against cos(phi), keeping the integrand bounded.
        integrand = np.longdouble(2.0 * t_star) * np.cos(phi.astype(np.longdouble))
        return float(np.sum(w.astype(np.longdouble) * integrand / np.sqrt(fac)))

    coarse = chord_integral(max(32, quad.n_radial))
    fine = chord_integral(2 * max(32, quad.n_radial))
    return QuadResult(value=fine, error=abs(fine - coarse))


def conv_pairing_oracle(
    spec: MeasureSpec, n: int, g: Callable, quad: QuadSpec = QuadSpec()
) -> QuadResult:
    """<sigma^{*n}, g> as an integral over n copies of the sheet.

    g must be vectorized like the surface_integral integrand.  Supported
    routes: tensor Gauss-Legendre for n = 2 (d = 2 or 3) and importance-
    sampled Monte Carlo for n in {2, 3} with d = 2.  The Monte Carlo error is
    a one-sigma standard error; tensor errors are two-resolution differences.
    """
    if n not in (2, 3):
        raise ValueError("pairing oracle supports n in {2, 3}")
    if spec.sheet == "both":
        raise ValueError("pairing oracle works one sheet at a time")
    flip = -1.0 if spec.sheet == "minus" else 1.0

    if quad.rule == "montecarlo":
        if spec.params.d != 2:
            raise ValueError("Monte-Carlo pairing is implemented for d = 2 only")
        return _pairing_montecarlo(spec.params, n, g, quad, flip)
    if n == 3:
        raise BudgetError(
            "tensor pairing for n = 3 would need a 6-D grid; "
            "use QuadSpec(rule='montecarlo')"
        )
    return _pairing_tensor_pair(spec.params, g, quad, flip)


def _pairing_tensor_pair(
    params: HyperboloidParams, g: Callable, quad: QuadSpec, flip: float
) -> QuadResult:
    def run(scale: int) -> float:
        q = QuadSpec(
            rule="tensor",
            radius=quad.radius,
            n_radial=max(4, quad.n_radial // 2 * scale),
            n_angular=max(8, quad.n_angular // 2 * scale),
            rtol=quad.rtol,
            atol=quad.atol,
        )
        xi, tau, w, _ = _sheet_nodes(params, q)
        total = 0.0
        chunk = max(1, 2_000_000 // max(xi.shape[0], 1))
        for lo in range(0, xi.shape[0], chunk):
            hi = min(lo + chunk, xi.shape[0])
            sx = xi[lo:hi, None, :] + xi[None, :, :]
            st = tau[lo:hi, None] + tau[None, :]
            vals = np.asarray(
                g(sx.reshape(-1, params.d), flip * st.reshape(-1)), dtype=float
            ).reshape(st.shape)
            total += float(np.sum(w[lo:hi, None] * w[None, :] * vals))
        return total

    coarse = run(1)
    fine = run(2)
    return QuadResult(value=fine, error=abs(fine - coarse))


def _pairing_montecarlo(
    params: HyperboloidParams, n: int, g: Callable, quad: QuadSpec, flip: float
) -> QuadResult:
    """Exact importance sampling: d(sigma) = du d(theta) in u = psi(y).

    Per factor, u - s is a unit exponential and theta is uniform, so the
    importance weight is (2 pi) e^{u - s} per factor.  No burn-in, no
    rejection; the estimator is an i.i.d. mean with a clean error bar.
    """
    rng = np.random.Generator(np.random.PCG64(quad.seed if quad.seed is not None else 0))
    s = params.s
    N = quad.samples
    sum_xi = np.zeros((N, 2))
    sum_tau = np.zeros(N)
    log_weight = np.zeros(N)
    for _ in range(n):
        u = s + rng.exponential(size=N)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=N)
        r = np.sqrt(u * u - s * s)
        sum_xi += np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
        sum_tau += u
        log_weight += u - s
    vals = np.asarray(g(sum_xi, flip * sum_tau), dtype=float)
    samples = vals * (2.0 * np.pi) ** n * np.exp(log_weight)
    value = float(np.mean(samples))
    error = float(np.std(samples, ddof=1) / np.sqrt(N))
    note = ""
    if error > max(quad.rtol * abs(value), quad.atol):
        note = "error-bar-exceeds-tolerance"
    return QuadResult(value=value, error=error, note=note)


def sum_support_predicate(s: float, sheets: tuple, xi, tau):
    """Support containment for sums of n points drawn from given sheets.

    sheets is a tuple of "plus"/"minus" of length 2 or 3.  Returns whether
    (xi, tau) can lie in the closed region guaranteed to contain the support
    of the corresponding convolution:

        n = 2:  (+,+) tau >= b,   (+,-) |tau| <= b,   (-,-) tau <= -b
        n = 3:  (+,+,+) tau >= b, (+,+,-) tau >= -b,
                (+,-,-) tau <= b, (-,-,-) tau <= -b

    with b = sqrt((n s)^2 + |xi|^2).  Vectorized over (xi, tau).
    """
    if not s > 0:
        raise ValueError("s must be positive")
    n = len(sheets)
    if n not in (2, 3) or any(sh not in ("plus", "minus") for sh in sheets):
        raise ValueError("sheets must be 2 or 3 entries of 'plus'/'minus'")
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if xi.ndim == 1 and tau.ndim == 0:
        xi_sq = np.dot(xi, xi)
    else:
        xi_sq = np.sum(xi * xi, axis=-1)
    b = np.sqrt((n * s) ** 2 + xi_sq)
    plus = sum(1 for sh in sheets if sh == "plus")
    if n == 2:
        out = {2: tau >= b, 1: np.abs(tau) <= b, 0: tau <= -b}[plus]
    else:
        out = {3: tau >= b, 2: tau >= -b, 1: tau <= b, 0: tau <= -b}[plus]
    return bool(out) if np.ndim(out) == 0 else out
