"""Blaschke products, Frostman shifts, g_theta and the Malmquist--Takenaka basis."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasisquare.blaschke import (
    BlaschkeProduct,
    RationalFn,
    evaluate,
    frostman_shift,
    g_theta,
    gram_matrix,
    mt_basis,
    polish_roots,
)
from quasisquare.fourier import CircleGrid
from quasisquare.model_space import membership_residual
from quasisquare.sampling import random_blaschke

GRID = CircleGrid(4096)


def theta_strategy(max_degree=5, origin=None):
    return st.builds(
        lambda seed, d: random_blaschke(np.random.default_rng(seed), d, origin=origin, min_abs_at_zero=0.05),
        st.integers(0, 2 ** 32 - 1), st.integers(1, max_degree))


# ---------------------------------------------------------------- evaluation

def test_evaluate_examples():
    assert evaluate(BlaschkeProduct.monomial(2), 1j) == pytest.approx(-1)
    assert evaluate(BlaschkeProduct((0, 0.5)), 0) == 0
    assert evaluate(BlaschkeProduct((0.5,)), 0) == pytest.approx(-0.5)


def test_evaluate_matches_definition(rng):
    theta = random_blaschke(rng, 4)
    z = 0.7 * np.exp(2j * np.pi * rng.uniform(size=20))
    direct = theta.constant * np.prod([(z - a) / (1 - np.conj(a) * z) for a in theta.zeros], axis=0)
    assert np.max(np.abs(theta(z) - direct)) < 1e-13


def test_constructor_rejects_bad_data():
    with pytest.raises(ValueError):
        BlaschkeProduct((1.0,))
    with pytest.raises(ValueError):
        BlaschkeProduct((0.5,), constant=2.0)


@settings(max_examples=50)
@given(theta_strategy(8))
def test_unimodular_on_circle(theta):
    assert theta.boundary_deviation(GRID) < 1e-10


@given(theta_strategy(6))
def test_value_at_zero_and_I0(theta):
    assert theta.at_zero == pytest.approx(theta.constant * np.prod([-a for a in theta.zeros]), abs=1e-15)
    assert theta.in_I0 == any(a == 0 for a in theta.zeros)


def test_json_round_trip():
    theta = BlaschkeProduct((0.1 + 0.2j, -0.5), constant=1j)
    back = BlaschkeProduct.from_json(theta.to_json())
    assert back == theta
    f = RationalFn([1, 2], [1, -0.5])
    g = RationalFn.from_json(f.to_json())
    assert np.array_equal(g.numerator.coeffs, f.numerator.coeffs)


def test_rational_rejects_pole_in_disk():
    with pytest.raises(ValueError):
        RationalFn([1.0], [1.0, -2.0])  # pole at 1/2


# ---------------------------------------------------------------- roots

def test_polish_roots_recovers_known_roots():
    roots = np.array([0.3, -0.2 + 0.5j, 0.9j])
    coeffs = np.poly(roots)[::-1]
    found, resid = polish_roots(coeffs)
    assert resid < 1e-9
    for r in roots:
        assert np.min(np.abs(found - r)) < 1e-12


# ---------------------------------------------------------------- Frostman shifts

def test_frostman_zero_shift_is_identity():
    theta = BlaschkeProduct((0.3, -0.4j))
    assert frostman_shift(theta, 0) is theta


def test_frostman_moves_value_to_origin():
    theta = BlaschkeProduct((0.5,))
    phi = frostman_shift(theta, -0.5)
    assert abs(phi(0)) < 1e-14


def test_frostman_of_z_squared():
    phi = frostman_shift(BlaschkeProduct.monomial(2), 0.5)
    assert np.allclose(np.sort_complex(np.array(phi.zeros)), [-1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)
    assert phi.boundary_deviation(GRID) < 1e-12
    z = np.array([0.2, 0.3j, -0.6 + 0.1j])
    assert np.allclose(phi(z), (z ** 2 - 0.5) / (1 - 0.5 * z ** 2), atol=1e-13)


def test_frostman_rejects_outside_disk():
    with pytest.raises(ValueError):
        frostman_shift(BlaschkeProduct((0.2,)), 1.0)


@settings(max_examples=40)
@given(theta_strategy(5, origin=False), st.floats(0.0, 0.9), st.floats(0, 2 * np.pi))
def test_frostman_round_trip(theta, r, t):
    w = r * np.exp(1j * t)
    phi = frostman_shift(theta, w)
    back = frostman_shift(phi, -w)
    z = CircleGrid(64).nodes * 0.8
    assert np.max(np.abs(back(z) - theta(z))) < 1e-8
    for a in theta.zeros:
        assert np.min(np.abs(np.array(back.zeros) - a)) < 1e-8


@settings(max_examples=40)
@given(theta_strategy(5, origin=False))
def test_shift_quotient_identity_on_circle(theta):
    # theta / phi = g / conj(g) with phi the shift by theta(0) and g = g_theta
    phi = frostman_shift(theta, theta.at_zero)
    g = g_theta(theta)
    z = GRID.nodes
    lhs = theta(z) / phi(z)
    gz = g(z)
    assert np.max(np.abs(lhs - gz / np.conj(gz))) < 1e-9


# ---------------------------------------------------------------- g_theta

def test_g_theta_trivial_for_I0():
    g = g_theta(BlaschkeProduct((0, 0.3 + 0.3j)))
    z = GRID.nodes
    assert np.max(np.abs(g(z) - 1)) < 1e-15


def test_g_theta_bounds_and_value():
    theta = BlaschkeProduct((0.5,))
    g = g_theta(theta)
    mod = np.abs(g(GRID.nodes))
    assert mod.min() >= 0.5 - 1e-12 and mod.max() <= 1.5 + 1e-12
    assert g(0) == pytest.approx(0.75)


@settings(max_examples=30)
@given(theta_strategy(5, origin=False))
def test_g_theta_bounds_random(theta):
    w = abs(theta.at_zero)
    pts = np.concatenate([GRID.nodes, 0.9 * GRID.nodes[::16], [0]])
    mod = np.abs(g_theta(theta)(pts))
    assert mod.min() >= (1 - w) * (1 - 1e-12) and mod.max() <= (1 + w) * (1 + 1e-12)


# ---------------------------------------------------------------- MT basis

def test_mt_basis_monomial():
    basis = mt_basis(BlaschkeProduct.monomial(4))
    z = np.array([0.3 + 0.2j, -0.5])
    for k, e in enumerate(basis):
        assert np.allclose(e(z), z ** k, atol=1e-15)


def test_mt_basis_single_factor():
    a = 0.4 - 0.3j
    (e,) = mt_basis(BlaschkeProduct((a,)))
    z = GRID.nodes
    assert np.allclose(e(z), np.sqrt(1 - abs(a) ** 2) / (1 - np.conj(a) * z), atol=1e-14)
    assert abs(gram_matrix([e], GRID)[0, 0] - 1) < 1e-10


@settings(max_examples=30)
@given(theta_strategy(6))
def test_mt_basis_orthonormal_and_in_model_space(theta):
    basis = mt_basis(theta)
    gram = gram_matrix(basis, GRID)
    assert np.max(np.abs(gram - np.eye(len(basis)))) < 1e-9
    for e in basis:
        assert membership_residual(e, theta) < 1e-9
