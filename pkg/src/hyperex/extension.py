"""Extension operator on exponential profiles and profile-weighted convolutions.

The operator maps a density f on the base space to

    (T f)(x, t) = int e^{i x.y} e^{i t psi(y)} f(y) dy / psi(y),

i.e. the spacetime Fourier transform of f d(sigma) up to sign conventions.
For the exponential profile f_a = e^{-a psi} everything reduces to radial
integrals in u = psi(y):

    d = 2 :  2 pi int_s^oo e^{-(a - i t) u} J0(|x| sqrt(u^2 - s^2)) du
             = 2 pi e^{-s w} / w,   w = principal_sqrt((a - i t)^2 + |x|^2)
    d = 3 :  (4 pi / |x|) int_s^oo e^{-(a - i t) u} sin(|x| sqrt(u^2 - s^2)) du
             (at x = 0: 4 pi int_s^oo e^{-(a - i t) u} sqrt(u^2 - s^2) du)

The closed d = 2 form follows from the Laplace transform of the J0 kernel
with lam = a - i t, which stays in the right half plane where the principal
branch is the analytic one; there is no closed d = 3 form here.

Even L^p norms of T f_a never touch oscillatory integrals: with k = p/2,

    ||T f||_{2k}^{2k} = (2 pi)^{d+1} ||(f sigma)^{*k}||_2^2

and the k-fold convolution of f_a sigma is the plain measure convolution
re-weighted by e^{-a tau}, because the convolution delta pins the total
energy to tau.  That gives two independent routes to every norm: the closed
products below (d = 2) and direct quadrature of the weighted closed density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad as _scipy_quad

from .geometry import HyperboloidParams, energy
from .measures import CLOSED_PAIRS, ConvClosedForm, conv_closed
from .quadrature import BudgetError, QuadResult, QuadSpec, gl_nodes, gl_panels
from .specfun import bessel_j0, exp_integral_ei, principal_sqrt


@dataclass(frozen=True)
class ExpProfile:
    """f_a(y) = e^{-a psi(y)} on the hyperboloid of the given parameters."""

    a: float
    params: HyperboloidParams

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("profile rate a must be positive")


def extension_closed(profile: ExpProfile, x, t):
    """Closed extension value; d = 2 only.  Vectorized over broadcast x, t.

    x is the spatial point (shape (..., 2)) and t the time; the result is
    complex 2 pi e^{-s w}/w with w = principal_sqrt((a - i t)^2 + |x|^2).
    """
    if profile.params.d != 2:
        raise ValueError("closed extension form exists for d = 2 only")
    a, s = profile.a, profile.params.s
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x_sq = np.sum(x * x, axis=-1)
    lam = a - 1j * t
    arg = lam * lam + x_sq
    if np.ndim(arg) == 0:
        w = principal_sqrt(complex(arg))
        return 2.0 * np.pi * np.exp(-s * w) / w
    # Re(lam) = a > 0 keeps arg off the cut; numpy's sqrt takes the same
    # principal branch as principal_sqrt away from it.
    w = np.sqrt(arg.astype(complex))
    return 2.0 * np.pi * np.exp(-s * w) / w


def extension_quadrature(
    profile: ExpProfile, x, t: float, quad: QuadSpec = QuadSpec()
) -> tuple[complex, float]:
    """Radial-quadrature extension value at one point; returns (value, error).

    Panels sized to the oscillation frequency |t| + |x|, Gauss-Legendre inside
    each; the error is a two-order difference.  Works for d = 2 and d = 3.
    """
    a, s, d = profile.a, profile.params.s, profile.params.d
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError(f"expected a point in R^{d}")
    t = float(t)
    x_norm = float(np.linalg.norm(x))
    u_max = s + 45.0 / a
    freq = abs(t) + x_norm
    panel = min(0.5 * np.pi / (freq + 1e-9), 3.0 / a, (u_max - s) / 8.0)
    n_panels = int(math.ceil((u_max - s) / panel))
    if n_panels * 32 > 4_000_000:
        raise BudgetError(
            f"extension quadrature would need {n_panels} panels; "
            "frequency too high for this budget"
        )
    edges = np.linspace(s, u_max, n_panels + 1)

    def evaluate(n_per: int) -> complex:
        # r = sqrt(u^2 - s^2) kinks at u = s, so the first panel runs in
        # v = sqrt(u - s) where the integrand is analytic again; the other
        # panels use one flat node array to keep J0 calls vectorized.
        base, wts = gl_nodes(0.0, 1.0, n_per)
        widths = np.diff(edges[1:])
        u = (edges[1:-1, None] + widths[:, None] * base[None, :]).ravel()
        w = (widths[:, None] * wts[None, :]).ravel()
        v, v_w = gl_nodes(0.0, math.sqrt(edges[1] - s), n_per)
        u = np.concatenate([s + v * v, u])
        w = np.concatenate([2.0 * v * v_w, w])
        r = np.sqrt(np.maximum(u * u - s * s, 0.0))
        osc = np.exp(-(a - 1j * t) * u)
        if d == 2:
            vals = 2.0 * np.pi * osc * bessel_j0(x_norm * r)
        elif x_norm == 0.0:
            vals = 4.0 * np.pi * osc * r
        else:
            vals = (4.0 * np.pi / x_norm) * osc * np.sin(x_norm * r)
        return complex(np.sum(w * vals))

    coarse = evaluate(12)
    fine = evaluate(24)
    return fine, abs(fine - coarse)


def l2_norm_sq(profile: ExpProfile) -> float:
    """||f_a||^2 in L^2 of the sheet measure.

    d = 2 closes to (pi / a) e^{-2 a s} (the measure is du d(theta) in
    u = psi); d = 3 is the radial integral 4 pi int_s^oo e^{-2au}
    sqrt(u^2 - s^2) du, done by adaptive quadrature.
    """
    a, s = profile.a, profile.params.s
    if profile.params.d == 2:
        return np.pi / a * math.exp(-2.0 * a * s)
    val, _ = _scipy_quad(
        lambda u: math.exp(-2.0 * a * u) * math.sqrt(u * u - s * s),
        s, s + 50.0 / a, epsabs=1e-300, epsrel=1e-12, limit=200,
    )
    return 4.0 * np.pi * val


def weighted_conv_closed(profile: ExpProfile, k: int, xi, tau):
    """k-fold convolution of f_a sigma: e^{-a tau} times the measure version.

    The convolution delta pins sum(psi_i) = tau, so the profile weights
    collapse to a single factor e^{-a tau} on the support.
    """
    form = ConvClosedForm(profile.params.d, k, profile.params.s)
    base = conv_closed(form, xi, tau)
    return np.exp(-profile.a * np.asarray(tau, dtype=float)) * base


def conv_power_l2_sq(
    profile: ExpProfile, k: int, method: str = "quadrature",
    quad: QuadSpec = QuadSpec(),
) -> QuadResult:
    """||(f_a sigma)^{*k}||^2 in L^2(R^{d+1}).

    method "closed" (d = 2): exact products

        k = 2 :  -(2 pi)^3 Ei(-4 a s) / (2 a)
        k = 3 :  (2 pi)^5 [ e^{-6 a s} (1/(8 a^3) - 3 s/(4 a^2))
                            - (3 s)^2 Ei(-6 a s) / (2 a) ]

    method "quadrature": spherical reduction of the squared weighted closed
    density.  The outer integral substitutes tau = k s + w' / (2 a) so the
    a -> 0 regime stays well conditioned, and splits panels at the scale
    changes of e^{-w'}.
    """
    d, s, a = profile.params.d, profile.params.s, profile.a
    if (d, k) not in CLOSED_PAIRS:
        raise ValueError(f"no closed convolution shape for (d, k) = ({d}, {k})")
    if method == "closed":
        if d != 2:
            raise ValueError("closed norm products exist for d = 2 only")
        if k == 2:
            return QuadResult(
                value=-((2.0 * np.pi) ** 3) * exp_integral_ei(-4.0 * a * s) / (2.0 * a),
                error=0.0,
            )
        value = (2.0 * np.pi) ** 5 * (
            math.exp(-6.0 * a * s) * (1.0 / (8.0 * a**3) - 3.0 * s / (4.0 * a**2))
            - (3.0 * s) ** 2 * exp_integral_ei(-6.0 * a * s) / (2.0 * a)
        )
        return QuadResult(value=value, error=0.0)
    if method != "quadrature":
        raise ValueError("method must be 'closed' or 'quadrature'")

    form = ConvClosedForm(d, k, s)
    sphere = 2.0 * np.pi if d == 2 else 4.0 * np.pi
    base = k * s

    def inner_integral(tau: float, n_nodes: int) -> float:
        rho_max = math.sqrt(max(tau * tau - base * base, 0.0))
        if rho_max == 0.0:
            return 0.0
        rho, w = gl_nodes(0.0, rho_max, n_nodes)
        xi = np.zeros((rho.size, d))
        xi[:, 0] = rho
        dens = conv_closed(form, xi, np.full(rho.size, tau))
        return float(np.sum(w * dens * dens * rho ** (d - 1)))

    def outer(n_nodes: int) -> float:
        def f(wp: float) -> float:
            tau = base + wp / (2.0 * a)
            return math.exp(-wp) * inner_integral(tau, n_nodes)

        total = 0.0
        for lo, hi in ((0.0, 1.0), (1.0, 5.0), (5.0, 15.0), (15.0, 60.0)):
            piece, _ = _scipy_quad(f, lo, hi, epsabs=1e-300, epsrel=1e-11, limit=200)
            total += piece
        return total * math.exp(-2.0 * a * base) / (2.0 * a) * sphere

    coarse = outer(max(48, quad.n_radial // 2))
    fine = outer(max(96, quad.n_radial))
    return QuadResult(value=fine, error=abs(fine - coarse))


def lp_norm_extension_via_conv(
    profile: ExpProfile, p: int, method: str = "quadrature",
    quad: QuadSpec = QuadSpec(),
) -> QuadResult:
    """||T f_a||_p through the convolution identity; p = 2k for k in {2, 3}.

    ||T f||_{2k}^{2k} = (2 pi)^{d+1} ||(f sigma)^{*k}||_2^2.
    """
    if p not in (4, 6) or p % 2:
        raise ValueError("p must be 4 or 6")
    k = p // 2
    d = profile.params.d
    norm_sq = conv_power_l2_sq(profile, k, method=method, quad=quad)
    value = ((2.0 * np.pi) ** (d + 1) * norm_sq.value) ** (1.0 / p)
    if norm_sq.value > 0:
        error = value * norm_sq.error / (p * norm_sq.value)
    else:
        error = float("nan")
    return QuadResult(value=value, error=error)


def _ridge_time_edges(rho: float, a: float, s: float) -> np.ndarray:
    """Panel edges in t >= 0 for |T f_a(rho e1, t)|^p, tracking t ~ rho.

    Near |t| = rho the closed form gives Re w = sqrt(rho) *
    sqrt(sqrt(dt^2 + a^2) - dt) with dt = |t| - rho, which relaxes to its
    floor a only once dt >> (a s)^2 rho.  Panels: a few inside the cone,
    a split pair across |t| = rho, then geometric doubling out to a far
    cutoff where the 1/t^p tail is negligible relative to the ridge mass.
    """
    delta = 0.5 * a
    edges = [0.0]
    if rho > 8.0 * delta:
        edges += [0.5 * rho, rho - 4.0 * delta, rho - delta, rho]
    elif rho > delta:
        edges.append(rho)
    if rho > delta:
        edges.append(rho + delta)
    t_max = max(100.0 * rho, 100.0 / s, 100.0 / a)
    lo, step = edges[-1], delta
    while lo < t_max:
        step *= 2.0
        lo = min(lo + step, t_max + 1.0)
        edges.append(lo)
    return np.asarray(edges)


def lp_norm_extension_direct(
    profile: ExpProfile, p: int, quad: QuadSpec = QuadSpec()
) -> QuadResult:
    """||T f_a||_p by quadrature of |T|^p over spacetime; d = 2 only.

    Uses only closed extension values on a polar (rho, t) grid:
    ||T f||_p^p = 2 pi int_0^oo int_R |T(rho e1, t)|^p rho dt d(rho),
    independent of the convolution route end to end.

    The integrand is not box-truncatable: along the ridge |t| ~ rho the
    decay exponent s Re w stalls near s a, so the radial mass profile
    g(rho) = 2 pi rho int |T|^p dt falls off like C / rho^(p-2) instead of
    exponentially.  The time panels therefore track the ridge per radial
    node, the radial panels double out to a large cutoff, and the leftover
    radial tail is extrapolated through the power law and folded into both
    the value and the error estimate.
    """
    if profile.params.d != 2:
        raise ValueError("direct norm quadrature is implemented for d = 2 only")
    if p not in (4, 6):
        raise ValueError("p must be 4 or 6")
    a, s = profile.a, profile.params.s
    rho_max = max(2000.0, 50.0 * quad.radius) * max(1.0, 1.0 / (a * s * s))

    def radial_mass(rho: float, n_per: int) -> float:
        t_pos, w_t = gl_panels(_ridge_time_edges(rho, a, s), n_per)
        x = np.zeros((t_pos.size, 2))
        x[:, 0] = rho
        dens = np.abs(extension_closed(profile, x, t_pos)) ** p
        # Factor 2: the density is even in t.
        return 4.0 * np.pi * rho * float(np.sum(w_t * dens))

    def evaluate(n_per: int) -> tuple[float, float, float]:
        edges = [0.0, 0.25 * min(1.0 / a, 1.0 / s, 1.0)]
        while edges[-1] < rho_max:
            edges.append(min(2.0 * edges[-1], rho_max))
        total, r_last, g_last = 0.0, 1.0, 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            nodes, wts = gl_nodes(lo, hi, n_per)
            g = np.array([radial_mass(r, n_per) for r in nodes])
            total += float(np.dot(wts, g))
            r_last, g_last = float(nodes[-1]), float(g[-1])
        return total, r_last, g_last

    coarse, _, _ = evaluate(20)
    fine, r_last, g_last = evaluate(28)
    # Radial tail from g ~ C / rho^(p-2):  int_R^oo g = g(R) R / (p - 3).
    tail = g_last * (r_last / rho_max) ** (p - 2) * rho_max / (p - 3)
    total = fine + tail
    norm_p = total ** (1.0 / p)
    err = abs(fine - coarse) + tail
    return QuadResult(value=norm_p, error=norm_p * err / (p * total))
