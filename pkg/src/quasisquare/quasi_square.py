"""Quasi-squaring operators.

``S f`` is the Herglotz integral of ``|f|^2``: on the circle ``Sf = u + i Hu``
with ``u = |f|^2``.  It satisfies ``|S(lam f)| = |lam|^2 |Sf|`` and
``|Sf| >= |f|^2``, keeps the degree of a polynomial, and maps ``K_theta``
into itself whenever ``theta(0) = 0``.  For a general finite Blaschke
``theta`` with ``w = theta(0)`` the shifted operator

    S_theta f = (1 + |w|) g_theta S(f / g_theta),   g_theta = 1 - conj(w) theta,

does the same job for ``K_theta``.

Two computations of ``S`` are provided and cross-checked in the tests:

* polynomials: exact autocorrelation of the Taylor coefficients;
* rational ``P/Q``: ``S f = R/Q`` with ``deg R <= max(deg P, deg Q)``; the
  first Fourier coefficients of ``|f|^2`` come from an FFT on a grid where
  aliasing is below double precision, and ``R`` is the truncated product
  ``Q * (Taylor series of Sf)``.  The fit is checked against the grid
  values ``u + i Hu``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .blaschke import (
    BlaschkeProduct,
    RationalFn,
    frostman_shift,
    g_theta,
    grid_for,
)
from .fourier import (
    DEFAULT_GRID,
    AnalyticPoly,
    BoundarySamples,
    CircleGrid,
    TrigCoeffs,
    b_constant,
    conjugate_samples,
    lp_norm,
    to_coeffs,
)
from .model_space import membership_residual, product_negative_energy

FIT_TOL = 1e-9
ALIAS_TOL = 1e-9


class AliasingWarning(UserWarning):
    pass


def autocorrelation(a) -> np.ndarray:
    """``u_k = sum_j a_{j+k} conj(a_j)`` for ``k = 0..d`` (Fourier coefficients of ``|f|^2``)."""
    a = np.asarray(a, dtype=complex)
    d = a.size - 1
    full = np.correlate(a, a, mode="full")
    return full[d:]


def _herglotz_coeffs(u_nonneg: np.ndarray) -> np.ndarray:
    s = np.array(u_nonneg, dtype=complex)
    s[1:] *= 2
    s[0] = s[0].real
    return s


def _quasi_square_poly(f: AnalyticPoly) -> AnalyticPoly:
    a = f.trimmed().coeffs
    return AnalyticPoly(_herglotz_coeffs(autocorrelation(a)))


def _quasi_square_rational(f: RationalFn, grid: CircleGrid | None = None) -> tuple[RationalFn, float]:
    p = f.numerator.trimmed()
    q = f.denominator.trimmed()
    if q.coeffs.size == 1:
        # keep the input denominator so callers may cancel against it
        out = _quasi_square_poly(AnalyticPoly(p.coeffs / q.coeffs[0]))
        return RationalFn(out * q.coeffs[0], q, check=False), 0.0
    d = max(p.degree, q.degree)
    if grid is None:
        grid = grid_for(f)
    grid.require_band(d + 1)
    nodes = grid.nodes
    u = np.abs(p(nodes) / q(nodes)) ** 2
    spec = np.fft.fft(u) / grid.size
    s = _herglotz_coeffs(spec[: d + 1])
    r = np.convolve(q.coeffs, s)[: d + 1]
    out = RationalFn(AnalyticPoly(r), q, check=False)
    on_grid = u + 1j * conjugate_samples(BoundarySamples(grid, u)).values.real
    scale = max(float(np.max(np.abs(on_grid))), 1e-300)
    residual = float(np.max(np.abs(out(nodes) - on_grid))) / scale
    return out, residual


def quasi_square(f, grid: CircleGrid | None = None):
    """The quasi-square ``Sf``.

    Parameters
    ----------
    f : AnalyticPoly or RationalFn
    grid : CircleGrid, optional
        Only used for rational input; chosen from the pole locations if omitted.

    Returns
    -------
    AnalyticPoly for polynomial input (degree never exceeds that of ``f``),
    RationalFn with the same denominator for rational input.
    """
    if isinstance(f, AnalyticPoly):
        return _quasi_square_poly(f)
    if isinstance(f, RationalFn):
        out, residual = _quasi_square_rational(f, grid)
        if residual > FIT_TOL:
            warnings.warn(f"rational fit of Sf has relative residual {residual:.2e}", AliasingWarning)
        return out
    raise TypeError(f"quasi_square expects AnalyticPoly or RationalFn, got {type(f).__name__}")


@dataclass
class GridQuasiSquare:
    """``Sf`` computed from boundary samples alone."""

    samples: BoundarySamples
    coeffs: AnalyticPoly
    aliasing: bool
    tail: float


def quasi_square_grid(f: BoundarySamples) -> GridQuasiSquare:
    """``u + i Hu`` with ``u = |f|^2`` computed by FFT on the grid of ``f``.

    ``aliasing`` is set when Fourier coefficients of ``u`` in the upper
    quarter of the resolvable band exceed ``ALIAS_TOL`` relative to ``u_0``.
    """
    grid = f.grid
    u = np.abs(f.values) ** 2
    v = conjugate_samples(BoundarySamples(grid, u)).values.real
    spec = np.fft.fft(u) / grid.size
    half = grid.size // 2
    s = _herglotz_coeffs(spec[:half])
    scale = max(abs(spec[0]), 1e-300)
    tail = float(np.max(np.abs(spec[half // 2: half]))) / scale
    return GridQuasiSquare(BoundarySamples(grid, u + 1j * v), AnalyticPoly(s), tail > ALIAS_TOL, tail)


def _proportional(a: AnalyticPoly, b: AnalyticPoly, tol: float = 1e-12):
    """Return ``k`` with ``b = k a`` (coefficientwise), or None."""
    a, b = a.trimmed(), b.trimmed()
    if a.coeffs.size != b.coeffs.size:
        return None
    k = b.coeffs[0] / a.coeffs[0]
    if np.max(np.abs(b.coeffs - k * a.coeffs)) <= tol * max(1.0, float(np.max(np.abs(b.coeffs)))):
        return k
    return None


def quasi_square_shifted(f, theta: BlaschkeProduct, grid: CircleGrid | None = None):
    """``S_theta f = (1 + |w|) g_theta S(f / g_theta)`` with ``w = theta(0)``.

    Reduces to :func:`quasi_square` when ``theta(0) = 0``.  The factor
    ``g_theta`` cancels against the denominator of ``S(f/g_theta)``, so the
    result is returned over ``Q_theta`` (times the denominator of ``f`` when
    that differs from ``Q_theta``).
    """
    w = theta.at_zero
    if theta.in_I0 or w == 0:
        return quasi_square(f, grid)
    fr = f if isinstance(f, RationalFn) else RationalFn(f, check=False)
    p, q = fr.numerator.trimmed(), fr.denominator.trimmed()
    q_theta = theta.denominator()
    g_num = g_theta(theta).numerator
    k = _proportional(q, q_theta)
    if k is not None:
        h = RationalFn(p * k, g_num, check=False)
        extra = AnalyticPoly([1.0])
    else:
        h = RationalFn(p * q_theta, q * g_num, check=False)
        extra = q
    sh = quasi_square(h, grid)
    return RationalFn(sh.numerator * (1.0 + abs(w)), q_theta * extra, check=False)


# -- verification ----------------------------------------------------------------

def interior_points(rng: np.random.Generator, count: int, radius: float = 0.95) -> np.ndarray:
    """Uniform (area) sample of the disk ``|z| <= radius``."""
    r = radius * np.sqrt(rng.uniform(size=count))
    t = rng.uniform(0, 2 * np.pi, size=count)
    return r * np.exp(1j * t)


@dataclass
class SuperquadraticReport:
    homogeneity_error: float
    lower_margin: float
    worst_point: complex
    boundary_margin: float
    interior_margin: float
    passed: bool


def verify_superquadratic(op: Callable, f, lam: complex = 1.0, grid: CircleGrid | None = None,
                          n_interior: int = 64, rng: np.random.Generator | None = None,
                          slack: float = 1e-10) -> SuperquadraticReport:
    """Check ``|op(lam f)| = |lam|^2 |op f|`` and ``|op f| >= |f|^2`` pointwise.

    Points: the circle grid plus ``n_interior`` random points of ``|z| <= 0.95``.
    Margins are relative to the largest of ``|op f|`` and ``|f|^2`` on the sample.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if grid is None:
        grid = CircleGrid(DEFAULT_GRID)
    pts_b = grid.nodes
    pts_i = interior_points(rng, n_interior)
    pts = np.concatenate([pts_b, pts_i])
    sf = op(f)
    slf = op(lam * f)
    a_sf = np.abs(sf(pts))
    a_slf = np.abs(slf(pts))
    fsq = np.abs(f(pts)) ** 2
    lam2 = abs(lam) ** 2
    scale = max(float(a_sf.max(initial=0.0)), float(fsq.max(initial=0.0)), 1e-300)
    hom = float(np.max(np.abs(a_slf - lam2 * a_sf))) / (max(lam2, 1e-300) * scale)
    margin = (a_sf - fsq) / scale
    worst = int(np.argmin(margin))
    nb = pts_b.size
    report = SuperquadraticReport(
        homogeneity_error=hom,
        lower_margin=float(margin[worst]),
        worst_point=complex(pts[worst]),
        boundary_margin=float(margin[:nb].min()),
        interior_margin=float(margin[nb:].min(initial=np.inf)),
        passed=bool(hom <= slack and margin[worst] >= -slack),
    )
    return report


@dataclass
class ChainReport:
    """Margins of ``|Sf| >= Re Sf = P[|f|^2] >= |f|^2`` at interior points."""

    modulus_vs_real: float
    real_vs_poisson: float
    poisson_vs_square: float
    min_real_part: float


def poisson_of_modulus_squared(f, z, grid: CircleGrid) -> np.ndarray:
    """Poisson integral of ``|f|^2`` by quadrature on the circle."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    nodes = grid.nodes
    u = np.abs(f(nodes)) ** 2
    kernel = (1 - np.abs(z[:, None]) ** 2) / np.abs(nodes[None, :] - z[:, None]) ** 2
    return kernel @ u / grid.size


def interior_chain(f, points, grid: CircleGrid | None = None) -> ChainReport:
    if grid is None:
        grid = grid_for(f) if isinstance(f, RationalFn) else CircleGrid(DEFAULT_GRID)
    sf = quasi_square(f)
    vals = sf(points)
    pois = poisson_of_modulus_squared(f, points, grid)
    fsq = np.abs(f(points)) ** 2
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    return ChainReport(
        modulus_vs_real=float(np.min(np.abs(vals) - vals.real)) / scale,
        real_vs_poisson=float(np.max(np.abs(vals.real - pois))) / scale,
        poisson_vs_square=float(np.min(pois - fsq)) / scale,
        min_real_part=float(np.min(vals.real)),
    )


@dataclass
class QuasiSquareResult:
    output: object
    input_norm: float
    output_norm: float
    pointwise_margin: float
    membership_residual: float | None = None


@dataclass
class NormBoundReport:
    p: float
    case: str
    w: complex
    output: object
    input_norm: float
    output_norm: float
    bound: float
    bound_ok: bool
    membership_residual: float | None
    input_membership: float | None
    identity_energy: float | None
    pointwise_margin: float
    grid_size: int
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = self.bound_ok and self.pointwise_margin >= -1e-10
        if self.membership_residual is not None:
            ok = ok and self.membership_residual < 1e-8
        if self.identity_energy is not None:
            ok = ok and self.identity_energy < 1e-9
        return ok

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k not in ("output", "extras", "w")}
        out["w"] = [self.w.real, self.w.imag]
        out["passed"] = self.passed
        out["output"] = self.output.to_json()
        out.update(self.extras)
        return out


def modulus_squared_coeffs(f, grid: CircleGrid) -> TrigCoeffs:
    """Fourier coefficients of ``|f|^2`` up to the band the grid resolves, negligible tail dropped."""
    vals = np.abs(f(grid.nodes)) ** 2
    coeffs = to_coeffs(BoundarySamples(grid, vals), grid.size // 2 - 1)
    scale = max(float(np.max(np.abs(coeffs.coeffs))), 1e-300)
    return coeffs.trim(1e-17 * scale)


def _check_exponent(p) -> float:
    p = float(p)
    if not 2.0 < p < np.inf:
        raise ValueError(
            f"p={p} is outside (2, inf); the p = 2 endpoint is handled by endpoint_blowup_sweep")
    return p


def verify_norm_bounds(f, ps, theta: BlaschkeProduct | None = None,
                          grid: CircleGrid | None = None, slack: float = 1e-8) -> list[NormBoundReport]:
    """:func:`verify_theorem31` for several exponents, sharing the quasi-square and membership work."""
    ps = [_check_exponent(p) for p in ps]
    if theta is None and isinstance(f, AnalyticPoly):
        theta = BlaschkeProduct.monomial(f.trimmed().coeffs.size)
    w = theta.at_zero if theta is not None else 0j
    case = "A" if abs(w) == 0 else "B"
    out = quasi_square_shifted(f, theta) if theta is not None else quasi_square(f)
    if grid is None:
        grid = grid_for(f, out, theta)
    nodes = grid.nodes
    fv = f(nodes)
    ov = out(nodes)
    scale = max(float(np.max(np.abs(ov))), 1e-300)
    margin = float(np.min(np.abs(ov) - np.abs(fv) ** 2)) / scale

    mem = in_mem = energy = None
    if theta is not None:
        in_mem = membership_residual(f, theta, grid)
        if in_mem < 1e-8:
            mem = membership_residual(out, theta, grid)
            if case == "A":
                u = modulus_squared_coeffs(f, grid)
                energy = product_negative_energy(u, theta, shift=-1)
            else:
                phi = frostman_shift(theta, w)
                g = g_theta(theta)
                u = modulus_squared_coeffs(lambda z: f(z) / g(z), grid)
                energy = product_negative_energy(u, phi, shift=-1)
    factor = ((1 + abs(w)) / (1 - abs(w))) ** 2
    reports = []
    for p in ps:
        in_norm = lp_norm(BoundarySamples(grid, fv), p)
        out_norm = lp_norm(BoundarySamples(grid, ov), p / 2)
        bound = b_constant(p) * factor * in_norm ** 2
        reports.append(NormBoundReport(
            p=p, case=case, w=complex(w), output=out, input_norm=in_norm, output_norm=out_norm,
            bound=bound, bound_ok=bool(out_norm <= bound * (1 + slack)),
            membership_residual=mem, input_membership=in_mem, identity_energy=energy,
            pointwise_margin=margin, grid_size=grid.size,
        ))
    return reports


def verify_theorem31(f, p: float, theta: BlaschkeProduct | None = None,
                     grid: CircleGrid | None = None, slack: float = 1e-8) -> NormBoundReport:
    """Check the quasi-square norm bound, membership and the key identity for one input.

    Case A (``theta`` absent or ``theta(0) = 0``): ``||Sf||_{p/2} <= B_p ||f||_p^2``.
    Case B: ``||S_theta f||_{p/2} <= B_p ((1+|w|)/(1-|w|))^2 ||f||_p^2``.
    When ``f`` lies in ``K_theta`` the output is tested for membership, and the
    nonnegative function ``u = |f|^2`` (or ``|f/g_theta|^2`` against the Frostman
    shift in case B) is tested for ``conj(z) u theta`` being analytic.
    A polynomial ``f`` without ``theta`` is placed in ``K_{z^{n+1}}``.
    """
    return verify_norm_bounds(f, [p], theta, grid, slack)[0]


def quasi_square_result(f, p: float, theta: BlaschkeProduct | None = None,
                        grid: CircleGrid | None = None) -> QuasiSquareResult:
    out = quasi_square_shifted(f, theta) if theta is not None else quasi_square(f)
    if grid is None:
        grid = grid_for(f, out, theta)
    fv, ov = f(grid.nodes), out(grid.nodes)
    scale = max(float(np.max(np.abs(ov))), 1e-300)
    return QuasiSquareResult(
        output=out,
        input_norm=lp_norm(BoundarySamples(grid, fv), p),
        output_norm=lp_norm(BoundarySamples(grid, ov), p / 2),
        pointwise_margin=float(np.min(np.abs(ov) - np.abs(fv) ** 2)) / scale,
        membership_residual=membership_residual(out, theta, grid) if theta is not None else None,
    )
