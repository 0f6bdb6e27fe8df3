"""Model spaces ``K_theta = H^p ∩ theta * conj(H^p_0)`` for finite Blaschke ``theta``.

For a finite Blaschke product of degree ``n`` the model space is the same
``n``-dimensional set of rational functions for every ``p``, namely
``R / prod(1 - conj(a_k) z)`` with ``deg R < n``; only the norms depend on
``p``.  Membership and projection are computed on a circle grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .blaschke import (
    BlaschkeProduct,
    RationalFn,
    basis_matrix,
    gram_matrix,
    grid_for,
    mt_basis,
)
from .fourier import (
    AnalyticPoly,
    BoundarySamples,
    CircleGrid,
    GridTooSmallError,
    TrigCoeffs,
    analytic_part_samples,
    to_coeffs,
)

MEMBERSHIP_TOL = 1e-8


def _grid_and_samples(f, theta: BlaschkeProduct, grid: CircleGrid | None):
    if isinstance(f, BoundarySamples):
        return f.grid, f
    if grid is None:
        if isinstance(f, TrigCoeffs):
            grid = grid_for(theta)
            while grid.size <= 2 * (f.band + theta.degree):
                grid = grid.refine()
        else:
            grid = grid_for(f, theta)
    if isinstance(f, TrigCoeffs):
        return grid, f.samples(grid)
    return grid, BoundarySamples(grid, f(grid.nodes))


def project_samples(h: BoundarySamples, theta: BlaschkeProduct) -> BoundarySamples:
    """``P_+ h - theta * P_+(conj(theta) h)`` evaluated on the grid of ``h``."""
    th = theta(h.grid.nodes)
    inner = analytic_part_samples(BoundarySamples(h.grid, np.conj(th) * h.values))
    outer = analytic_part_samples(h)
    return BoundarySamples(h.grid, outer.values - th * inner.values)


def p_theta_project(h: TrigCoeffs, theta: BlaschkeProduct, grid: CircleGrid | None = None,
                    band: int | None = None) -> TrigCoeffs:
    """Orthogonal projection of a trigonometric polynomial onto ``K_theta``.

    The grid must satisfy ``N > 2 (M + deg theta)``.  For a monomial ``theta``
    the result is exact and band-limited; otherwise it is rational and the
    returned coefficients are truncated at ``band`` (default: everything the
    grid resolves, with negligible outer coefficients trimmed).
    """
    if grid is None:
        grid, _ = _grid_and_samples(h, theta, None)
    if grid.size <= 2 * (h.band + theta.degree):
        raise GridTooSmallError(
            f"grid of size {grid.size} too small for band {h.band} and degree {theta.degree}")
    out = project_samples(h.samples(grid), theta)
    if band is None:
        coeffs = to_coeffs(out, grid.size // 2 - 1)
        scale = max(float(np.max(np.abs(coeffs.coeffs))), 1e-300)
        return coeffs.trim(1e-14 * scale)
    return to_coeffs(out, band)


def _l2(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


@dataclass
class MembershipReport:
    projection: float
    conjugate: float
    norm: float

    @property
    def residual(self) -> float:
        return self.projection


def membership_diagnostics(f, theta: BlaschkeProduct, grid: CircleGrid | None = None,
                           eps: float = 1e-300) -> MembershipReport:
    """Both membership tests for ``f`` in ``K_theta``.

    ``projection`` is ``||f - P_theta f||_2 / ||f||_2``; ``conjugate`` is the
    relative L^2 size of the negative-frequency part of ``conj(z f) theta``.
    For analytic ``f`` the two agree.
    """
    grid, s = _grid_and_samples(f, theta, grid)
    norm = _l2(s.values)
    denom = max(norm, eps)
    proj = project_samples(s, theta)
    projection = _l2(s.values - proj.values) / denom
    nodes = grid.nodes
    g = np.conj(nodes) * np.conj(s.values) * theta(nodes)
    spec = np.fft.fft(g) / grid.size
    neg = spec[grid.frequencies() < 0]
    conjugate = float(np.sqrt(np.sum(np.abs(neg) ** 2))) / denom
    return MembershipReport(projection=projection, conjugate=conjugate, norm=norm)


def membership_residual(f, theta: BlaschkeProduct, grid: CircleGrid | None = None) -> float:
    """``||f - P_theta f||_2 / max(||f||_2, eps)``."""
    return membership_diagnostics(f, theta, grid).projection


def product_negative_coeffs(u: TrigCoeffs, theta: BlaschkeProduct, shift: int = 0) -> np.ndarray:
    """Negative-frequency coefficients of ``zeta^shift * u * theta``.

    Computed by exact pairing of the coefficients of ``u`` with the Taylor
    coefficients of ``theta``; only finitely many terms contribute because
    ``theta`` is analytic.  Returned in order of increasing frequency,
    from ``-M + shift`` to ``-1``.
    """
    m = u.band
    top = m - shift
    if top <= 0:
        return np.zeros(0, dtype=complex)
    taylor = theta.taylor(top)
    if top > 256:
        # same linear convolution, computed by FFT for long bands
        conv = fftconvolve(u.coeffs, taylor)
    else:
        conv = np.convolve(u.coeffs, taylor)
    return conv[:top]


def product_negative_energy(u: TrigCoeffs, theta: BlaschkeProduct, shift: int = 0) -> float:
    """L^2 size of :func:`product_negative_coeffs` relative to ``||u||_2``."""
    neg = product_negative_coeffs(u, theta, shift)
    return float(np.sqrt(np.sum(np.abs(neg) ** 2))) / max(u.l2_norm(), 1e-300)


def reproducing_kernel(theta: BlaschkeProduct, w, z):
    """``(1 - conj(theta(w)) theta(z)) / (1 - conj(w) z)``."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(w) >= 1) or np.any(np.abs(z) >= 1):
        raise ValueError("kernel arguments must lie in the open unit disk")
    return (1.0 - np.conj(theta(w)) * theta(z)) / (1.0 - np.conj(w) * z)


@dataclass(frozen=True)
class ModelSpace:
    """``K_theta`` with its Malmquist--Takenaka basis."""

    theta: BlaschkeProduct
    basis: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.theta.degree == 0:
            raise ValueError("model space of a constant inner function is trivial")
        object.__setattr__(self, "basis", tuple(mt_basis(self.theta)))

    @property
    def dimension(self) -> int:
        return self.theta.degree

    @property
    def contains_constants(self) -> bool:
        return self.theta.in_I0

    @property
    def denominator(self) -> AnalyticPoly:
        return self.theta.denominator()

    def element(self, coeffs) -> RationalFn:
        """``sum c_k e_k`` as a single rational function over ``prod(1 - conj(a_k) z)``."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} coefficients")
        den = self.denominator
        num = AnalyticPoly(np.zeros(self.dimension, dtype=complex))
        for c, e in zip(coeffs, self.basis):
            # e_k = norm * prod_{j<k}(z - a_j) / prod_{j<=k}(1 - conj(a_j) z)
            rest = np.ones(1, dtype=complex)
            for a in self.theta.zero_array[len(e.denominator.coeffs) - 1:]:
                rest = np.convolve(rest, [1.0, -np.conj(a)])
            num = num + c * (e.numerator * AnalyticPoly(rest))
        return RationalFn(num, den, check=False)

    def evaluate_basis(self, points) -> np.ndarray:
        return basis_matrix(list(self.basis), points)

    def gram(self, grid: CircleGrid | int | None = None) -> np.ndarray:
        if grid is None:
            grid = grid_for(self.theta)
        return gram_matrix(list(self.basis), grid)

    def project(self, h, grid: CircleGrid | None = None):
        if isinstance(h, TrigCoeffs):
            return p_theta_project(h, self.theta, grid)
        grid, s = _grid_and_samples(h, self.theta, grid)
        return project_samples(s, self.theta)

    def membership_residual(self, f, grid: CircleGrid | None = None) -> float:
        return membership_residual(f, self.theta, grid)

    def contains(self, f, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.membership_residual(f) < tol * np.sqrt(self.dimension)

    def kernel(self, w, z):
        return reproducing_kernel(self.theta, w, z)

    def random_element(self, rng: np.random.Generator) -> RationalFn:
        c = rng.normal(size=self.dimension) + 1j * rng.normal(size=self.dimension)
        return self.element(c / np.linalg.norm(c))
