"""Real parts of model-space functions.

For ``theta(0) = 0`` a real ``u`` is ``Re f`` for some ``f`` in ``K_theta``
exactly when ``conj(z) u theta`` is analytic.  When ``theta(0) != 0`` two
conditions are needed: ``u theta`` analytic, and

    I(u) = int u (theta/theta(0) - 1/2) dm

purely imaginary.  In that case the imaginary constant of the completion is
forced: ``f = u + i(Hu + 2c)`` where ``I(u) = i c``.

Both conditions are evaluated by exact pairing of Fourier coefficients of
``u`` with Taylor coefficients of ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, RationalFn, grid_for
from .fourier import AnalyticPoly, BoundarySamples, CircleGrid, TrigCoeffs, to_coeffs
from .model_space import membership_residual, product_negative_energy

REAL_PART_TOL = 1e-8


class RealPartError(ValueError):
    """``u`` is not the real part of a model-space function."""


@dataclass
class RealPartWitness:
    u: TrigCoeffs
    theta: BlaschkeProduct
    case: str
    energy: float
    integral: complex | None
    verdict: bool
    completion: AnalyticPoly | None = None

    @property
    def offset(self) -> float:
        """Imaginary part forced on ``f(0)``: 0 in case a, ``2 Im I(u)`` in case b."""
        if self.case == "a" or self.integral is None:
            return 0.0
        return 2.0 * self.integral.imag

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "energy": self.energy,
            "integral": None if self.integral is None else [self.integral.real, self.integral.imag],
            "verdict": self.verdict,
            "completion": None if self.completion is None else self.completion.to_json(),
        }


def origin_integral(u: TrigCoeffs, theta: BlaschkeProduct) -> complex:
    """``int u (theta/theta(0) - 1/2) dm`` by coefficient pairing."""
    w = theta.at_zero
    if w == 0:
        raise ValueError("the integral condition needs theta(0) != 0")
    m = u.band
    taylor = theta.taylor(m + 1)
    # zeroth coefficient of u*theta: sum_i theta_i u_{-i}
    zeroth = np.dot(taylor, u.coeffs[m::-1])
    return complex(zeroth / w - 0.5 * u.coef(0))


def _completion(u: TrigCoeffs, offset: float) -> AnalyticPoly:
    a = u.nonnegative()
    a[1:] *= 2
    a[0] = a[0].real + 1j * offset
    return AnalyticPoly(a)


def check_real_part(u: TrigCoeffs, theta: BlaschkeProduct, tol: float = REAL_PART_TOL) -> RealPartWitness:
    """Decide whether ``u`` is the real part of a function in ``K_theta``."""
    if theta.degree == 0:
        raise ValueError("theta must be a nonconstant inner function")
    if not u.is_real():
        raise ValueError("u must be real-valued (conjugate-symmetric coefficients)")
    scale = u.l2_norm()
    if theta.in_I0:
        energy = product_negative_energy(u, theta, shift=-1)
        verdict = bool(energy < tol)
        witness = RealPartWitness(u, theta, "a", energy, None, verdict)
    else:
        energy = product_negative_energy(u, theta, shift=0)
        integral = origin_integral(u, theta)
        imaginary = abs(integral.real) < tol * (scale + abs(integral))
        verdict = bool(energy < tol and imaginary)
        witness = RealPartWitness(u, theta, "b", energy, integral, verdict)
    if witness.verdict:
        witness.completion = _completion(u, witness.offset)
    return witness


def complete_to_model(u: TrigCoeffs, theta: BlaschkeProduct, tol: float = REAL_PART_TOL) -> AnalyticPoly:
    """The function ``f = u + i(Hu + v0)`` in ``K_theta`` with ``Re f = u``.

    ``v0 = 0`` when ``theta(0) = 0`` and ``v0 = 2c`` otherwise, where the
    integral condition reads ``I(u) = i c``.  Raises :class:`RealPartError`
    with both condition values when ``u`` does not qualify.
    """
    witness = check_real_part(u, theta, tol)
    if not witness.verdict:
        raise RealPartError(
            f"u is not in Re K_theta (case {witness.case}): negative-coefficient energy "
            f"{witness.energy:.3e}, integral {witness.integral}")
    return witness.completion


@dataclass
class UniquenessReport:
    case: str
    offsets: list
    residuals: list
    forced_offset: float

    @property
    def members(self) -> list:
        return [r < REAL_PART_TOL * 10 for r in self.residuals]


def uniqueness_probe(u: TrigCoeffs, theta: BlaschkeProduct, offsets,
                     grid: CircleGrid | None = None) -> UniquenessReport:
    """Membership residual of ``u + i(Hu + v0)`` for each offset ``v0``."""
    witness = check_real_part(u, theta)
    if grid is None:
        grid = grid_for(theta)
        while grid.size <= 4 * u.band:
            grid = grid.refine()
    residuals = [membership_residual(_completion(u, float(v0)), theta, grid) for v0 in offsets]
    return UniquenessReport(witness.case, [float(v) for v in offsets], residuals, witness.offset)


def real_part_coeffs(f, band: int, grid: CircleGrid | None = None) -> TrigCoeffs:
    """Fourier coefficients of ``Re f`` on the circle, truncated to ``band``.

    Rational functions have geometrically decaying coefficients, so a band
    chosen from the pole radius (see :func:`band_for`) loses nothing at
    double precision.
    """
    if grid is None:
        grid = CircleGrid(max(4096, 1 << int(np.ceil(np.log2(4 * band + 4)))))
    vals = np.real(f(grid.nodes))
    coeffs = to_coeffs(BoundarySamples(grid, vals.astype(complex)), band)
    return coeffs.real_part()


def band_for(f: RationalFn | AnalyticPoly, digits: float = 40.0, minimum: int = 8) -> int:
    """Band beyond which the Fourier coefficients of ``f`` are below ``exp(-digits)``."""
    if isinstance(f, AnalyticPoly):
        return max(f.degree, minimum)
    rho = f.pole_radius()
    if rho == 0.0:
        return max(f.numerator.degree, minimum)
    return max(minimum, int(np.ceil(digits / -np.log(rho))) + f.numerator.degree)
