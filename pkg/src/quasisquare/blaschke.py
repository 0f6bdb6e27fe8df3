"""Finite Blaschke products and rational boundary functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .fourier import (
    DEFAULT_GRID,
    AnalyticPoly,
    BoundarySamples,
    CircleGrid,
    _from_pairs,
    _pair_list,
    next_pow2,
)

ROOT_RESIDUAL_TOL = 1e-9
BOUNDARY_REJECT_TOL = 1e-8


class RootFindingError(RuntimeError):
    pass


def _poly_from_roots(roots) -> np.ndarray:
    """Ascending coefficients of ``prod (z - r)``."""
    return np.asarray(np.poly(np.asarray(roots, dtype=complex))[::-1], dtype=complex) \
        if len(roots) else np.ones(1, dtype=complex)


def polish_roots(coeffs: np.ndarray, tol: float = ROOT_RESIDUAL_TOL, newton_steps: int = 8):
    """Roots of an ascending-coefficient polynomial, Newton-polished.

    Companion-matrix eigenvalues (``numpy.roots``; LAPACK balances the matrix)
    followed by Newton polishing wherever the scaled residual exceeds ``tol``.

    Returns
    -------
    roots : ndarray
    residual : float
        Largest residual ``|p(r)| / sum |a_k| |r|^k`` over the roots.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        raise RootFindingError("null polynomial has no well-defined roots")
    coeffs = coeffs[: nz[-1] + 1]
    if coeffs.size == 1:
        return np.zeros(0, dtype=complex), 0.0
    desc = coeffs[::-1]
    roots = np.roots(desc).astype(complex)
    deriv = np.polyder(desc)
    absdesc = np.abs(desc)

    def scaled_residual(r):
        return np.abs(np.polyval(desc, r)) / np.maximum(np.polyval(absdesc, np.abs(r)), 1e-300)

    res = scaled_residual(roots)
    for _ in range(newton_steps):
        if np.all(res < 1e-15):
            break
        d = np.polyval(deriv, roots)
        step = np.where(d != 0, np.polyval(desc, roots) / np.where(d != 0, d, 1), 0)
        cand = roots - step
        better = scaled_residual(cand) < res
        roots = np.where(better, cand, roots)
        res = scaled_residual(roots)
    worst = float(res.max(initial=0.0))
    if worst > tol:
        raise RootFindingError(f"root finder did not converge: residual {worst:.3e}")
    return roots, worst


class RationalFn:
    """Quotient ``numerator / denominator`` of analytic polynomials.

    The denominator must not vanish on the closed unit disk, so the function
    is holomorphic on a neighbourhood of it.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None, check: bool = True):
        if not isinstance(numerator, AnalyticPoly):
            numerator = AnalyticPoly(numerator)
        if denominator is None:
            denominator = AnalyticPoly([1.0])
        elif not isinstance(denominator, AnalyticPoly):
            denominator = AnalyticPoly(denominator)
        self.numerator = numerator
        self.denominator = denominator
        if check:
            margin = self.denominator_margin()
            if margin <= 0.0:
                raise ValueError("denominator vanishes on the closed unit disk")

    def denominator_margin(self) -> float:
        """Smallest ``|root| - 1`` over denominator roots (``inf`` for constants).

        Also confirms the modulus on a circle grid is bounded away from zero.
        """
        den = self.denominator.trimmed()
        if den.is_null():
            return -math.inf
        if den.coeffs.size == 1:
            return math.inf
        roots = np.roots(den.coeffs[::-1])
        margin = float(np.min(np.abs(roots)) - 1.0)
        grid_min = float(np.min(np.abs(den(CircleGrid(1024).nodes))))
        if grid_min <= 0.0 or abs(den(0.0)) == 0.0:
            return -math.inf
        return margin

    def pole_radius(self) -> float:
        """``max 1/|pole|``; the Fourier coefficients decay like this number to the power k."""
        den = self.denominator.trimmed()
        if den.coeffs.size == 1:
            return 0.0
        roots = np.roots(den.coeffs[::-1])
        return float(np.max(1.0 / np.abs(roots)))

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.trimmed().coeffs.size == 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.numerator(z) / self.denominator(z)

    def taylor(self, count: int) -> np.ndarray:
        """First ``count`` Taylor coefficients, by exact power-series division.

        The recursion ``den * out = num`` is an IIR filter driven by the
        numerator, which ``scipy.signal.lfilter`` runs in compiled code.
        """
        if count <= 0:
            return np.zeros(0, dtype=complex)
        drive = self.numerator.taylor(count)
        return lfilter([1.0], self.denominator.coeffs, drive).astype(complex)

    def samples(self, grid: CircleGrid | int = DEFAULT_GRID) -> BoundarySamples:
        if isinstance(grid, int):
            grid = CircleGrid(grid)
        return BoundarySamples(grid, self(grid.nodes))

    def derivative(self) -> "RationalFn":
        p, q = self.numerator, self.denominator
        return RationalFn(p.derivative() * q - p * q.derivative(), q * q, check=False)

    def square(self) -> "RationalFn":
        return RationalFn(self.numerator * self.numerator, self.denominator * self.denominator, check=False)

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return RationalFn(self.numerator * other.numerator,
                              self.denominator * other.denominator, check=False)
        if isinstance(other, AnalyticPoly):
            return RationalFn(self.numerator * other, self.denominator, check=False)
        if np.isscalar(other):
            return RationalFn(self.numerator * other, self.denominator, check=False)
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, AnalyticPoly):
            other = RationalFn(other, check=False)
        if isinstance(other, RationalFn):
            return RationalFn(self.numerator * other.denominator + other.numerator * self.denominator,
                              self.denominator * other.denominator, check=False)
        if np.isscalar(other):
            return RationalFn(self.numerator + self.denominator * other, self.denominator, check=False)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __repr__(self):
        return f"RationalFn(deg num={self.numerator.degree}, deg den={self.denominator.degree})"

    def to_json(self) -> dict:
        return {"numerator": _pair_list(self.numerator.coeffs),
                "denominator": _pair_list(self.denominator.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFn":
        return cls(_from_pairs(data["numerator"]), _from_pairs(data["denominator"]))


def as_rational(f) -> RationalFn:
    if isinstance(f, RationalFn):
        return f
    if isinstance(f, AnalyticPoly):
        return RationalFn(f, check=False)
    raise TypeError(f"cannot interpret {type(f).__name__} as a rational function")


@dataclass(frozen=True)
class BlaschkeProduct:
    """``c * prod_k (z - a_k)/(1 - conj(a_k) z)`` with ``|c| = 1`` and ``|a_k| < 1``.

    Zeros at the origin are listed like any other zero; their count is
    :attr:`origin_multiplicity`.  The order of ``zeros`` is significant for
    :func:`mt_basis`.
    """

    zeros: tuple = field(default_factory=tuple)
    constant: complex = 1.0

    def __post_init__(self):
        zs = tuple(complex(a) for a in np.atleast_1d(np.asarray(self.zeros, dtype=complex)))
        if any(abs(a) >= 1.0 for a in zs):
            raise ValueError("Blaschke zeros must lie in the open unit disk")
        c = complex(self.constant)
        if abs(abs(c) - 1.0) > 1e-12:
            raise ValueError(f"constant must be unimodular, got |c| = {abs(c)}")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "constant", c / abs(c))

    @classmethod
    def monomial(cls, n: int) -> "BlaschkeProduct":
        """``z^n``; its model space is the polynomials of degree < n."""
        return cls((0.0,) * n)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def zero_array(self) -> np.ndarray:
        return np.asarray(self.zeros, dtype=complex)

    @property
    def origin_multiplicity(self) -> int:
        return sum(1 for a in self.zeros if a == 0)

    @property
    def at_zero(self) -> complex:
        """``theta(0) = c * prod(-a_k)``."""
        return complex(self.constant * np.prod(-self.zero_array)) if self.zeros else complex(self.constant)

    @property
    def in_I0(self) -> bool:
        return self.origin_multiplicity > 0

    @property
    def is_monomial(self) -> bool:
        return self.degree > 0 and self.origin_multiplicity == self.degree

    def numerator(self) -> AnalyticPoly:
        return AnalyticPoly(self.constant * _poly_from_roots(self.zero_array))

    def denominator(self) -> AnalyticPoly:
        out = np.ones(1, dtype=complex)
        for a in self.zero_array:
            out = np.convolve(out, [1.0, -np.conj(a)])
        return AnalyticPoly(out)

    def as_rational(self) -> RationalFn:
        return RationalFn(self.numerator(), self.denominator(), check=False)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        m = self.origin_multiplicity
        out = self.constant * z ** m if m else np.full(z.shape, self.constant, dtype=complex)
        for a in self.zeros:
            if a != 0:
                out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out

    def taylor(self, count: int) -> np.ndarray:
        return self.as_rational().taylor(count)

    def samples(self, grid: CircleGrid | int = DEFAULT_GRID) -> BoundarySamples:
        if isinstance(grid, int):
            grid = CircleGrid(grid)
        return BoundarySamples(grid, self(grid.nodes))

    def pole_radius(self) -> float:
        return float(np.max(np.abs(self.zero_array), initial=0.0))

    def square(self) -> "BlaschkeProduct":
        return BlaschkeProduct(self.zeros + self.zeros, self.constant ** 2)

    def __mul__(self, other):
        if isinstance(other, BlaschkeProduct):
            return BlaschkeProduct(self.zeros + other.zeros, self.constant * other.constant)
        return NotImplemented

    def boundary_deviation(self, grid: CircleGrid | int = DEFAULT_GRID) -> float:
        """``max | |theta| - 1 |`` over the grid."""
        return float(np.max(np.abs(np.abs(self.samples(grid).values) - 1.0)))

    def to_json(self) -> dict:
        return {"constant": [self.constant.real, self.constant.imag],
                "zeros": _pair_list(self.zero_array)}

    @classmethod
    def from_json(cls, data: dict) -> "BlaschkeProduct":
        c = data.get("constant", [1.0, 0.0])
        const = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
        return cls(tuple(_from_pairs(data.get("zeros", []))), const)


def evaluate(theta: BlaschkeProduct, z):
    return theta(z)


def frostman_shift(theta: BlaschkeProduct, w: complex) -> BlaschkeProduct:
    """``(theta - w)/(1 - conj(w) theta)`` as a Blaschke product of the same degree.

    Its zeros are the roots of ``c*prod(z - a_k) - w*prod(1 - conj(a_k) z)``.
    """
    w = complex(w)
    if abs(w) >= 1.0:
        raise ValueError("shift parameter must lie in the open unit disk")
    if w == 0:
        return theta
    if theta.degree == 0:
        raise ValueError("cannot shift a constant")
    num = theta.numerator().taylor(theta.degree + 1) - w * theta.denominator().taylor(theta.degree + 1)
    roots, _ = polish_roots(num)
    if roots.size != theta.degree:
        raise RootFindingError(
            f"shifted numerator has degree {roots.size}, expected {theta.degree}")
    if np.any(np.abs(roots) >= 1.0 - BOUNDARY_REJECT_TOL):
        raise RootFindingError("Frostman shift produced a zero on or near the unit circle")
    # pin the unimodular constant at a boundary point where phi is well conditioned
    probe = np.exp(2j * np.pi * np.arange(7) / 7 + 0.3j)
    target = (theta(probe) - w) / (1.0 - np.conj(w) * theta(probe))
    bare = BlaschkeProduct(tuple(roots), 1.0)(probe)
    ratio = np.mean(target / bare)
    return BlaschkeProduct(tuple(roots), ratio / abs(ratio))


def g_theta(theta: BlaschkeProduct) -> RationalFn:
    """``1 - conj(theta(0)) * theta`` (invertible in H-infinity)."""
    w = theta.at_zero
    num = theta.denominator() - np.conj(w) * theta.numerator()
    return RationalFn(num, theta.denominator())


def mt_basis(theta: BlaschkeProduct) -> list[RationalFn]:
    """Malmquist--Takenaka orthonormal basis of the model space of ``theta``.

    ``e_k(z) = sqrt(1 - |a_k|^2)/(1 - conj(a_k) z) * prod_{j<k} (z - a_j)/(1 - conj(a_j) z)``,
    in the order the zeros are stored.
    """
    basis = []
    num = np.ones(1, dtype=complex)
    den = np.ones(1, dtype=complex)
    for a in theta.zero_array:
        norm = math.sqrt(1.0 - abs(a) ** 2)
        den = np.convolve(den, [1.0, -np.conj(a)])
        basis.append(RationalFn(AnalyticPoly(norm * num), AnalyticPoly(den.copy()), check=False))
        num = np.convolve(num, [-a, 1.0])
    return basis


def basis_matrix(basis: list[RationalFn], points) -> np.ndarray:
    """``E[i, k] = e_k(z_i)``."""
    points = np.asarray(points, dtype=complex)
    if not basis:
        return np.zeros((points.size, 0), dtype=complex)
    return np.stack([e(points) for e in basis], axis=1)


def gram_matrix(basis: list[RationalFn], grid: CircleGrid | int = DEFAULT_GRID) -> np.ndarray:
    """``G[j, k] = <e_k, e_j>`` in ``L^2(m)`` by grid quadrature."""
    if isinstance(grid, int):
        grid = CircleGrid(grid)
    e = basis_matrix(basis, grid.nodes)
    return (e.conj().T @ e) / grid.size


def grid_for(*functions, base: int = DEFAULT_GRID, digits: float = 40.0, max_size: int = 1 << 20) -> CircleGrid:
    """Grid fine enough that aliasing of the given rational data is negligible.

    Fourier coefficients of a function with poles at radius ``1/rho`` decay
    like ``rho^k``; ``N`` is chosen with ``rho^(N/2) < exp(-digits)``.
    """
    rho = 0.0
    degree = 0
    for f in functions:
        if f is None:
            continue
        rho = max(rho, f.pole_radius() if hasattr(f, "pole_radius") else 0.0)
        if isinstance(f, AnalyticPoly):
            degree = max(degree, f.degree)
        elif isinstance(f, RationalFn):
            degree = max(degree, f.numerator.degree, f.denominator.degree)
        elif isinstance(f, BlaschkeProduct):
            degree = max(degree, f.degree)
    n = base
    if rho > 0.0:
        n = max(n, next_pow2(int(2 * digits / -math.log(rho)) + 1))
    n = max(n, next_pow2(8 * degree + 8))
    return CircleGrid(min(n, max_size))
