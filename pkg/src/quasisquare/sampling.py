"""Random instances for property suites."""

from __future__ import annotations

import numpy as np

from .blaschke import BlaschkeProduct, RationalFn
from .fourier import AnalyticPoly, TrigCoeffs
from .model_space import ModelSpace


def random_point(rng: np.random.Generator, max_radius: float, min_radius: float = 0.0) -> complex:
    r = np.sqrt(rng.uniform(min_radius ** 2, max_radius ** 2))
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def random_blaschke(rng: np.random.Generator, degree: int, max_radius: float = 0.85,
                    origin: bool | None = None, min_abs_at_zero: float = 0.0) -> BlaschkeProduct:
    """Random Blaschke product.

    ``origin=True`` forces a zero at 0 (``theta(0) = 0``); ``origin=False``
    keeps all zeros away from 0 and, via ``min_abs_at_zero``, keeps
    ``|theta(0)|`` from being tiny.
    """
    for _ in range(1000):
        zeros = [random_point(rng, max_radius, 0.0 if origin is None else 0.1) for _ in range(degree)]
        if origin:
            zeros[0] = 0j
        c = np.exp(2j * np.pi * rng.uniform())
        theta = BlaschkeProduct(tuple(zeros), c)
        if origin is False and abs(theta.at_zero) < max(min_abs_at_zero, 1e-6):
            continue
        return theta
    raise RuntimeError("could not draw a Blaschke product with the requested properties")


def random_poly(rng: np.random.Generator, degree: int) -> AnalyticPoly:
    c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return AnalyticPoly(c / np.sqrt(degree + 1))


def random_model_element(rng: np.random.Generator, theta: BlaschkeProduct) -> RationalFn:
    return ModelSpace(theta).random_element(rng)


def random_real_trig(rng: np.random.Generator, band: int) -> TrigCoeffs:
    pos = (rng.normal(size=band) + 1j * rng.normal(size=band)) / np.arange(1, band + 1)
    c0 = rng.normal()
    return TrigCoeffs(np.concatenate([np.conj(pos[::-1]), [c0], pos]))
