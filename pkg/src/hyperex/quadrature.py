"""Shared quadrature plumbing: grid specs, results with error estimates.

Everything here is deterministic. Gauss-Legendre nodes come from
numpy.polynomial.legendre and are cached per order; Monte-Carlo streams are
owned by the callers (they pass an explicit seed through QuadSpec).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class BudgetError(RuntimeError):
    """Raised when a requested tolerance cannot be met within the node budget."""


@dataclass(frozen=True)
class QuadSpec:
    """Resolution knobs for the numerical routes.

    rule        : "tensor" for product Gauss-Legendre grids, "montecarlo"
                  for the importance-sampled estimators.
    radius      : truncation radius in the base (frequency) variable.
    n_radial    : Gauss-Legendre points per radial panel/axis.
    n_angular   : points per angular circle (trapezoid, exact for periodics).
    samples     : Monte-Carlo sample count.
    seed        : Monte-Carlo stream seed; None lets the caller's default win.
    rtol, atol  : accuracy targets used for budget checks and result flags.
    """

    rule: str = "tensor"
    radius: float = 40.0
    n_radial: int = 96
    n_angular: int = 64
    samples: int = 200_000
    seed: int | None = None
    rtol: float = 1e-9
    atol: float = 1e-12

    def __post_init__(self) -> None:
        if self.rule not in ("tensor", "montecarlo"):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.radius <= 0 or self.n_radial < 2 or self.n_angular < 4:
            raise ValueError("degenerate quadrature spec")
        if self.samples < 100:
            raise ValueError("Monte-Carlo budget too small to estimate an error bar")


@dataclass(frozen=True)
class QuadResult:
    """A numerical value with an error estimate.

    For tensor rules the error is a two-resolution difference; for Monte Carlo
    it is the one-sigma standard error of the mean.  `note` is empty unless the
    estimate failed its own tolerance, in which case the partial result is
    still returned but flagged.
    """

    value: float
    error: float
    note: str = ""


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def gl_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def gl_panels(edges: np.ndarray, n_per: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes over consecutive panels given by `edges`."""
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gl_nodes(float(a), float(b), n_per)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def trapezoid_angles(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Equispaced angles on [0, 2pi) with equal weights (periodic trapezoid)."""
    theta = np.arange(n) * (2.0 * np.pi / n)
    w = np.full(n, 2.0 * np.pi / n)
    return theta, w


def two_resolution(evaluate, n: int) -> QuadResult:
    """Run `evaluate(n)` and `evaluate(2n)`; report the finer value.

    The coarse/fine difference is the (conservative) error estimate.
    """
    coarse = evaluate(n)
    fine = evaluate(2 * n)
    return QuadResult(value=fine, error=abs(fine - coarse))
