"""Embedding norms, solid operators, the doubling step and the Littlewood--Paley examples."""

import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasisquare.blaschke import BlaschkeProduct
from quasisquare.embedding import (
    DiskMeasure,
    EmptyRegionWarning,
    check_solid,
    default_support,
    differentiation_operator,
    doubling_chain,
    doubling_constant,
    embedding_norm,
    extrapolation_doubling_check,
    fixed_regions,
    identity_operator,
    littlewood_paley_energy,
    lp_counterexample_sweep,
    maximal_operator,
    maximal_operator_spec,
    radial_regions,
    refined_area_integral,
    stolz_regions,
)
from quasisquare.fourier import AnalyticPoly, CircleGrid
from quasisquare.model_space import reproducing_kernel
from quasisquare.sampling import random_blaschke, random_poly

GRID = CircleGrid(256)


def random_atomic(rng, count):
    r = 0.95 * np.sqrt(rng.uniform(size=count))
    z = r * np.exp(2j * np.pi * rng.uniform(size=count))
    return DiskMeasure(z, rng.uniform(0.1, 2.0, size=count))


# ---------------------------------------------------------------- measures

def test_measure_validation():
    with pytest.raises(ValueError):
        DiskMeasure([0.5], [0.0])
    with pytest.raises(ValueError):
        DiskMeasure([1.5], [1.0])
    with pytest.raises(ValueError):
        DiskMeasure([0.1, 0.2], [1.0])


def test_measure_json_round_trip():
    mu = DiskMeasure.atoms([(0.5, 1.0), (0.1 - 0.3j, 0.25)])
    back = DiskMeasure.from_json(json.loads(json.dumps(mu.to_json())))
    assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)


def test_boundary_atom_rejected_at_singularity():
    theta = BlaschkeProduct((0.5,))
    # the pole of theta sits at 2, so a boundary atom is admissible unless the tolerance is huge
    DiskMeasure.atom(1.0).check_for(theta)
    with pytest.raises(ValueError):
        DiskMeasure.atom(1.0).check_for(theta, tol=0.6)


def test_polar_measure_area():
    # int (1-|z|) dA = pi/3
    assert DiskMeasure.polar().total_mass == pytest.approx(np.pi / 3, rel=1e-12)


# ---------------------------------------------------------------- embedding norm examples

@pytest.mark.parametrize("n", [0, 2, 5])
def test_norm_circle_measure_is_one(n):
    res = embedding_norm(BlaschkeProduct.monomial(n + 1), 2, 2, DiskMeasure.circle(GRID))
    assert res.method == "eigen"
    assert res.value == pytest.approx(1.0, rel=1e-12)


def test_norm_atom_at_half():
    res = embedding_norm(BlaschkeProduct.monomial(3), 2, 2, DiskMeasure.atom(0.5))
    assert res.squared == pytest.approx(21 / 16, rel=1e-12)


def test_norm_constants_atom_at_zero():
    assert embedding_norm(BlaschkeProduct.monomial(1), 2, 2, DiskMeasure.atom(0.0)).value == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_single_atom_equals_kernel_diagonal(seed):
    # oracle: the point-evaluation norm squared is K_theta(z0, z0)
    rng = np.random.default_rng(seed)
    theta = random_blaschke(rng, int(rng.integers(1, 6)))
    z0 = 0.9 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    w = rng.uniform(0.1, 3)
    res = embedding_norm(theta, 2, 2, DiskMeasure.atom(z0, w))
    assert res.squared == pytest.approx(w * reproducing_kernel(theta, z0, z0).real, rel=1e-9)


def test_eigensolver_and_optimizer_agree(rng):
    # a maximal operator whose regions repeat the atom twice is the identity,
    # but its two evaluation rows send embedding_norm down the ascent path
    worst = 0.0
    for _ in range(10):
        theta = random_blaschke(rng, int(rng.integers(1, 5)))
        mu = random_atomic(rng, int(rng.integers(1, 9)))
        exact = embedding_norm(theta, 2, 2, mu)
        op = maximal_operator_spec(radial_regions(mu.points, [1.0, 1.0]))
        approx = embedding_norm(theta, 2, 2, mu, op=op, starts=8)
        assert exact.method == "eigen"
        assert approx.method == "ascent" and approx.lower_bound
        worst = max(worst, abs(approx.value - exact.value) / exact.value)
    assert worst < 1e-6


def test_rejects_bad_exponents():
    mu = DiskMeasure.atom(0.0)
    with pytest.raises(ValueError):
        embedding_norm(BlaschkeProduct.monomial(2), 1.0, 2, mu)
    with pytest.raises(ValueError):
        embedding_norm(BlaschkeProduct.monomial(2), 2, 0, mu)


def test_adding_atom_never_decreases(rng):
    for _ in range(8):
        theta = random_blaschke(rng, 3)
        mu = random_atomic(rng, 3)
        base = embedding_norm(theta, 2, 2, mu).value
        more = embedding_norm(theta, 2, 2, mu.with_atom(0.3j, 0.5)).value
        assert more >= base * (1 - 1e-12)
        b4 = embedding_norm(theta, 4, 4, mu, starts=6)
        m4 = embedding_norm(theta, 4, 4, mu.with_atom(0.3j, 0.5), starts=6)
        assert m4.value >= b4.value * (1 - 1e-6)


@pytest.mark.parametrize("q", [2.0, 3.0])
def test_scaling_measure(q, rng):
    theta = random_blaschke(rng, 3)
    mu = random_atomic(rng, 4)
    t = 5.0
    a = embedding_norm(theta, 2, q, mu, starts=6).value
    b = embedding_norm(theta, 2, q, mu.scaled(t), starts=6).value
    assert b == pytest.approx(t ** (1 / q) * a, rel=1e-6)


def test_q_infinity_is_max_over_atoms():
    theta = BlaschkeProduct.monomial(3)
    mu = DiskMeasure.atoms([(0.5, 1.0), (0.2, 1.0)])
    res = embedding_norm(theta, 2, np.inf, mu, starts=4)
    assert res.squared == pytest.approx(21 / 16, rel=1e-6)
    assert res.method.startswith("pointwise")


# ---------------------------------------------------------------- doubling

def test_doubling_constant_factor_nine():
    theta = BlaschkeProduct((0.5,))  # theta(0) = -1/2
    assert doubling_constant(2, theta) == pytest.approx(2 * 9)
    assert doubling_constant(2, BlaschkeProduct.monomial(2)) == pytest.approx(2)


def test_doubling_atom_example():
    rep = extrapolation_doubling_check(BlaschkeProduct.monomial(2), DiskMeasure.atom(0.9), samples=20, starts=8)
    assert rep.low_exact
    assert rep.m_low == pytest.approx(math.sqrt(1 + 0.81), rel=1e-12)
    assert rep.holds and rep.pointwise_holds


def test_doubling_circle_example():
    rep = extrapolation_doubling_check(BlaschkeProduct.monomial(3), DiskMeasure.circle(GRID), samples=10, starts=4)
    assert rep.m_low == pytest.approx(1.0, rel=1e-10)
    assert rep.passed


def test_doubling_random(rng):
    for _ in range(4):
        theta = random_blaschke(rng, int(rng.integers(1, 4)))
        rep = extrapolation_doubling_check(theta, random_atomic(rng, 5), samples=20, starts=6,
                                           seed=int(rng.integers(1 << 30)))
        assert rep.passed, rep.to_json()


def test_doubling_rejects_bad_exponents():
    with pytest.raises(ValueError):
        extrapolation_doubling_check(BlaschkeProduct.monomial(2), DiskMeasure.atom(0.1), sigma=1.0)


def test_doubling_chain(rng):
    theta = random_blaschke(rng, 3)
    chain = doubling_chain(theta, random_atomic(rng, 4), levels=3, starts=6)
    assert chain.exponents == [2.0, 4.0, 8.0]
    assert all(np.isfinite(chain.values))
    assert chain.holds


# ---------------------------------------------------------------- solidity

def test_identity_is_solid():
    rep = check_solid(identity_operator(default_support(np.random.default_rng(0), 16, 16)),
                      BlaschkeProduct((0.3, -0.2j)), trials=30)
    assert rep.claims_hold and rep.witness.passed
    assert all(p.passed for p in rep.properties.values())


def test_maximal_is_solid():
    op = maximal_operator_spec(stolz_regions(CircleGrid(32)))
    rep = check_solid(op, BlaschkeProduct((0.5j,)), trials=30, seed=3)
    assert rep.claims_hold


def test_differentiation_falsified_by_witness():
    op = differentiation_operator(default_support(np.random.default_rng(0), 16, 16))
    rep = check_solid(op, BlaschkeProduct.monomial(2), trials=5)
    assert not rep.witness.passed
    assert rep.witness.counterexample.startswith("F = z, G = 1")
    assert not rep.properties["monotone"].passed
    assert rep.properties["subadditive"].passed and rep.properties["homogeneous"].passed


def test_check_solid_catches_broken_operator():
    support = np.array([0.1, 0.5j])
    op = identity_operator(support)
    op.apply = lambda f: np.abs(f(support)) ** 2  # not homogeneous of degree one
    rep = check_solid(op, BlaschkeProduct.monomial(2), trials=5)
    assert not rep.properties["homogeneous"].passed


# ---------------------------------------------------------------- maximal operator

def test_maximal_examples():
    z = AnalyticPoly([0.0, 1.0])
    assert np.all(maximal_operator(z, GRID, fixed_regions(GRID, [0.0])).values == 0)
    assert np.allclose(maximal_operator(z, GRID, radial_regions(GRID, [0.5])).values, 0.5, atol=1e-15)
    c = AnalyticPoly([3 - 4j])
    assert np.allclose(maximal_operator(c, GRID).values, 5.0)


def test_maximal_empty_region_warns():
    regions = fixed_regions(CircleGrid(8), [])
    with pytest.warns(EmptyRegionWarning):
        out = maximal_operator(AnalyticPoly([1.0]), CircleGrid(8), regions)
    assert np.all(out.values == 0)


def test_maximal_dominates_boundary_limit():
    f = random_poly(np.random.default_rng(4), 5)
    out = maximal_operator(f, GRID, stolz_regions(GRID, truncation=1e-9)).values.real
    assert np.all(out >= np.abs(f(GRID.nodes)) * (1 - 1e-6))


# ---------------------------------------------------------------- Littlewood--Paley

def test_lp_examples():
    assert littlewood_paley_energy(AnalyticPoly([0.0, 1.0])) == pytest.approx(np.pi / 3)
    assert littlewood_paley_energy(AnalyticPoly([1.0])) == 0


def test_lp_energy_matches_quadrature(rng):
    for _ in range(3):
        f = random_poly(rng, 12)
        df = f.derivative()
        val, _ = refined_area_integral(lambda z: np.abs(df(z)) ** 2, 0.25, tol=1e-12)
        assert val == pytest.approx(littlewood_paley_energy(f), rel=1e-8)


@settings(max_examples=100)
@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=40))
def test_lp_polynomial_bound(coeffs):
    f = AnalyticPoly(coeffs)
    assert littlewood_paley_energy(f) <= np.pi / 2 * np.sum(np.abs(f.coeffs) ** 2) * (1 + 1e-14)


def test_lp_rejects_rational():
    from quasisquare.blaschke import RationalFn
    with pytest.raises(TypeError):
        littlewood_paley_energy(RationalFn([1.0], [1.0, -0.5]))


def _lp_series(a):
    """Oracle: both sides of R(a) by power series in |a|^2."""
    with mpmath.workdps(30):
        x = mpmath.mpf(a) ** 2
        norm = mpmath.hyp2f1(1.5, 1.5, 1, x)
        energy = 2 * mpmath.pi * mpmath.mpf(a) ** 3 * mpmath.nsum(
            lambda n: mpmath.binomial(n + 2, 2) ** 2 * x ** n * (1 / (2 * n + 2) - 1 / (2 * n + 3)),
            [0, mpmath.inf])
        return float(norm), float(energy)


def test_lp_sweep_matches_series_and_is_band_stable():
    sweep = lp_counterexample_sweep()
    for row in sweep.rows:
        n3, e3 = _lp_series(row.a)
        assert row.norm3_cubed == pytest.approx(n3, rel=1e-8)
        assert row.energy3 == pytest.approx(e3, rel=1e-8)
    assert sweep.band_stable
    assert all(0.5 <= t <= 2 for t in sweep.consecutive_ratios)
    assert sweep.to_csv().splitlines()[0] == "a,norm3_cubed,energy3,R(a),R(a)*(1-a),N_used"


def test_lp_sweep_rejects_outside():
    with pytest.raises(ValueError):
        lp_counterexample_sweep([1.0])
