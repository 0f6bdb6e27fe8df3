"""Endpoint exponents.

At ``p = inf`` the map ``f -> ||f||_inf f`` is superquadratic with constant 1.
At ``p = 2`` no superquadratic family ``K^2_theta -> K^1_theta`` is uniformly
bounded.  The witnesses are the two-factor products ``theta_a = z (z-a)/(1-conj(a) z)``
and ``f_a = 1/(1 - conj(a) z)``: ``K_{theta_a}`` is spanned by ``1`` and
``f_a``, and ``r(a) = ||S f_a||_1 / ||f_a||_2^2`` grows without bound as
``|a| -> 1``.

Notes
-----
The blow-up of ``r(a)`` is logarithmic in ``1/(1 - |a|)``, so a desk-scale
sweep shows slow but steady growth rather than a dramatic divergence.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, RationalFn
from .fourier import (
    AnalyticPoly,
    BoundarySamples,
    CircleGrid,
    DEFAULT_GRID,
    lp_norm,
    next_pow2,
)
from .model_space import membership_residual
from .quasi_square import quasi_square

SPAN_TOL = 1e-8
QUAD_TOL = 1e-12
MAX_GRID = 1 << 22


class RefinementExhausted(RuntimeError):
    """Quadrature did not stabilize before the grid-size cap."""


def sup_norm_square(f):
    """``||f||_inf * f``, the superquadratic map at ``p = inf``.

    ``f`` may be boundary samples (the sup is the grid max) or an
    :class:`AnalyticPoly` together with its grid sup, in which case the
    scaled polynomial is returned.
    """
    if isinstance(f, BoundarySamples):
        return BoundarySamples(f.grid, lp_norm(f, np.inf) * f.values)
    if isinstance(f, AnalyticPoly):
        s = lp_norm(f.samples(DEFAULT_GRID), np.inf)
        return AnalyticPoly(s * f.coeffs)
    raise TypeError("expected BoundarySamples or AnalyticPoly")


def _check_a(a, lower: float = 0.0) -> complex:
    a = complex(a)
    if not abs(a) < 1:
        raise ValueError("a must lie in the open unit disk")
    if abs(a) < lower:
        raise ValueError(f"|a| must be at least {lower}")
    return a


def f_a(a) -> RationalFn:
    a = _check_a(a)
    return RationalFn([1.0], [1.0, -np.conj(a)])


def theta_a(a) -> BlaschkeProduct:
    a = _check_a(a)
    return BlaschkeProduct((0j, a))


def fa_norms(a) -> tuple[float, float]:
    """Closed forms ``(||f_a||_2^2, ||f_a||_4^4)``.

    ``||f_a||_2^2 = sum |a|^{2n} = 1/(1-|a|^2)``; ``f_a^2`` has Taylor
    coefficients ``(n+1) conj(a)^n``, so ``||f_a||_4^4 = (1+|a|^2)/(1-|a|^2)^3``.
    """
    x = abs(_check_a(a)) ** 2
    return 1.0 / (1.0 - x), (1.0 + x) / (1.0 - x) ** 3


def endpoint_grid(a) -> CircleGrid:
    """Smallest admissible grid for ``f_a``: ``N (1 - |a|) >= 64``, at least 4096."""
    r = abs(_check_a(a))
    return CircleGrid(max(DEFAULT_GRID, next_pow2(int(math.ceil(64.0 / (1.0 - r))))))


def refined_mean(func, grid: CircleGrid, tol: float = QUAD_TOL, max_size: int = MAX_GRID):
    """Grid mean of ``func`` on the circle, doubling ``N`` until two levels agree.

    Returns ``(value, N)`` where ``N`` is the finer size used.
    """
    prev = np.mean(func(grid.nodes))
    while True:
        if 2 * grid.size > max_size:
            raise RefinementExhausted(f"no stable quadrature below N={max_size}")
        grid = grid.refine()
        cur = np.mean(func(grid.nodes))
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur, grid.size
        prev = cur


def fa_norms_quadrature(a, tol: float = QUAD_TOL) -> tuple[float, float, int]:
    """Grid values of ``||f_a||_2^2`` and ``||f_a||_4^4`` with the grid size used."""
    f = f_a(a)
    grid = endpoint_grid(a)
    l2, n1 = refined_mean(lambda z: np.abs(f(z)) ** 2, grid, tol)
    l4, n2 = refined_mean(lambda z: np.abs(f(z)) ** 4, grid, tol)
    return float(np.real(l2)), float(np.real(l4)), max(n1, n2)


@dataclass
class HardyBound:
    value: float
    tail: float
    cutoff: int


def hardy_lower_bound(h, cutoff: int | None = None) -> HardyBound:
    """``(1/pi) sum_{n <= cutoff} |h_n| / (n+1)``, a lower bound for ``||h||_1``.

    Every partial sum is a valid lower bound because all terms are
    nonnegative.  ``tail`` bounds what the omitted terms could add, using the
    geometric decay of the Taylor coefficients of a rational ``h``
    (``inf`` when no decay estimate is available).
    """
    if isinstance(h, AnalyticPoly):
        coeffs = h.coeffs if cutoff is None else h.taylor(cutoff + 1)
        tail = 0.0
    elif isinstance(h, RationalFn):
        rho = h.pole_radius()
        if cutoff is None:
            cutoff = 64 if rho == 0 else int(math.ceil(40.0 / -math.log(rho))) + h.numerator.degree
        coeffs = h.taylor(cutoff + 1)
        if rho == 0:
            tail = 0.0
        else:
            # |h_n| <= |h_cutoff| (rho')^(n - cutoff) with a slightly inflated ratio
            ratio = min(1.0, rho * 1.01)
            last = abs(coeffs[-1])
            tail = last * ratio / (1.0 - ratio) / (cutoff + 2) / np.pi if ratio < 1 else math.inf
    else:
        coeffs = np.asarray(h, dtype=complex)
        if cutoff is not None:
            coeffs = coeffs[: cutoff + 1]
        tail = math.inf
    n = np.arange(len(coeffs))
    value = float(np.sum(np.abs(coeffs) / (n + 1)) / np.pi)
    return HardyBound(value, float(tail), len(coeffs) - 1)


def hardy_series_bound(a, lam: complex, mu: complex) -> float:
    """Hardy sum for ``h = lam + mu f_a`` in closed form.

    ``(1/pi)(|lam + mu| + |mu| sum_{n>=1} |a|^n/(n+1))`` with
    ``sum_{n>=1} x^n/(n+1) = (-log(1-x) - x)/x``.
    """
    x = abs(_check_a(a))
    series = 0.0 if x == 0 else (-math.log1p(-x) - x) / x
    return (abs(lam + mu) + abs(mu) * series) / np.pi


def span_coefficients(h, a, grid: CircleGrid) -> tuple[complex, complex, float]:
    """``(lam, mu)`` with ``h ~ lam + mu f_a`` by the 2x2 normal equations in ``L^2``.

    Returns the relative ``L^2`` residual as the third entry.
    """
    f = f_a(a)
    z = grid.nodes
    hv = h(z)
    fv = f(z)
    gram = np.array([[1.0, np.mean(np.conj(fv))], [np.mean(fv), np.mean(np.abs(fv) ** 2)]])
    rhs = np.array([np.mean(hv), np.mean(hv * np.conj(fv))])
    lam, mu = np.linalg.solve(gram, rhs)
    resid = np.sqrt(np.mean(np.abs(hv - lam - mu * fv) ** 2)) / max(np.sqrt(np.mean(np.abs(hv) ** 2)), 1e-300)
    return complex(lam), complex(mu), float(resid)


@dataclass
class SpanCheck:
    a: complex
    lam: complex
    mu: complex
    parseval: float
    quadrature: float | None
    upper: float
    f4: float
    c_exact: float
    hypothesis: bool
    conclusion: bool

    @property
    def implication_holds(self) -> bool:
        return (not self.hypothesis) or self.conclusion

    @property
    def parseval_error(self) -> float:
        if self.quadrature is None:
            return 0.0
        return abs(self.parseval - self.quadrature) / max(self.parseval, 1e-300)


def check_4_10(a, lam: complex, mu: complex, quadrature: bool = True) -> SpanCheck:
    """Parseval for ``h = lam + mu f_a`` and the lower bound it forces.

    ``||h||_2^2 = |lam+mu|^2 + |mu|^2 |a|^2/(1-|a|^2)``, which is at most
    ``|lam+mu|^2 + |mu|^2/(1-|a|)``.  If ``||h||_2^2 >= ||f_a||_4^4`` then
    the latter is at least ``c/(1-|a|)^3`` with ``c = ||f_a||_4^4 (1-|a|)^3``;
    ``c`` is ``(1+|a|^2)/(1+|a|)^3``, never below 1/4.
    """
    a = _check_a(a)
    x = abs(a) ** 2
    parseval = abs(lam + mu) ** 2 + abs(mu) ** 2 * x / (1.0 - x)
    upper = abs(lam + mu) ** 2 + abs(mu) ** 2 / (1.0 - abs(a))
    _, f4 = fa_norms(a)
    c_exact = (1.0 + x) / (1.0 + abs(a)) ** 3
    quad = None
    if quadrature:
        f = f_a(a)
        val, _ = refined_mean(lambda z: np.abs(lam + mu * f(z)) ** 2, endpoint_grid(a))
        quad = float(np.real(val))
    hypothesis = parseval >= f4 * (1 - 1e-12)
    conclusion = upper >= c_exact / (1.0 - abs(a)) ** 3 * (1 - 1e-12)
    return SpanCheck(a, complex(lam), complex(mu), parseval, quad, upper, f4, c_exact, hypothesis, conclusion)


@dataclass
class EndpointSample:
    a: complex
    theta_a: BlaschkeProduct
    f_a: RationalFn
    h_a: RationalFn
    lambda_a: complex
    mu_a: complex
    ratio: float
    l1_norm: float
    hardy_bound: float
    span_residual: float
    membership: float
    min_excess: float
    grid_size: int

    @property
    def lam_plus_mu(self) -> float:
        return abs(self.lambda_a + self.mu_a)

    @property
    def mu_log(self) -> float:
        return abs(self.mu_a) * math.log(1.0 / (1.0 - abs(self.a)))

    @property
    def parseval_upper(self) -> float:
        return self.lam_plus_mu ** 2 + abs(self.mu_a) ** 2 / (1.0 - abs(self.a))

    def row(self) -> dict:
        return {
            "a": abs(self.a) if self.a.imag == 0 else self.a,
            "r(a)": self.ratio,
            "|lambda+mu|": self.lam_plus_mu,
            "|mu|": abs(self.mu_a),
            "hardy_bound": self.hardy_bound,
            "N_used": self.grid_size,
        }


def endpoint_sample(a, tol: float = QUAD_TOL) -> EndpointSample:
    """Quasi-square of ``f_a`` and every quantity of the blow-up argument at one ``a``."""
    a = _check_a(a, lower=0.5)
    th = theta_a(a)
    f = f_a(a)
    h = quasi_square(f)  # theta_a(0) = 0, so the shifted operator reduces to S
    grid = endpoint_grid(a)
    l1, n_used = refined_mean(lambda z: np.abs(h(z)), grid, tol)
    l1 = float(np.real(l1))
    final = CircleGrid(n_used)
    lam, mu, resid = span_coefficients(h, a, final)
    z = final.nodes
    excess = np.abs(h(z)) - np.abs(f(z)) ** 2
    scale = np.abs(f(z)) ** 2
    l2sq, _ = fa_norms(a)
    return EndpointSample(
        a=a, theta_a=th, f_a=f, h_a=h, lambda_a=lam, mu_a=mu,
        ratio=l1 / l2sq, l1_norm=l1,
        hardy_bound=hardy_lower_bound(h).value,
        span_residual=resid,
        membership=membership_residual(h, th, final),
        min_excess=float(np.min(excess / scale)),
        grid_size=n_used,
    )


@dataclass
class SweepTable:
    samples: list

    @property
    def ratios(self) -> list:
        return [s.ratio for s in self.samples]

    @property
    def increasing(self) -> bool:
        r = self.ratios
        return all(x < y for x, y in zip(r, r[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["a", "r(a)", "|lambda_a+mu_a|", "|mu_a|", "hardy_bound", "N_used"])
        for s in self.samples:
            writer.writerow([repr(float(abs(s.a))), *(format(v, ".17g") for v in
                             (s.ratio, s.lam_plus_mu, abs(s.mu_a), s.hardy_bound)), s.grid_size])
        return buf.getvalue()


def default_sweep_points() -> list[float]:
    return [1.0 - 2.0 ** -k for k in range(2, 11)]


def endpoint_blowup_sweep(a_values=None, tol: float = QUAD_TOL, strict: bool = True) -> SweepTable:
    """Blow-up table along ``a_values`` (sorted by modulus).

    With ``strict`` the sweep raises ``AssertionError`` if ``r(a)`` fails to
    increase strictly with ``|a|``.
    """
    if a_values is None:
        a_values = default_sweep_points()
    pts = sorted((complex(a) for a in a_values), key=abs)
    table = SweepTable([endpoint_sample(a, tol) for a in pts])
    if strict and not table.increasing:
        raise AssertionError(f"r(a) not strictly increasing: {table.ratios}")
    return table
