"""Property suites run by ``quasisquare suite``.

Each suite draws its own random corpus from a child of the master seed, so
suites are reproducible individually and in any order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .blaschke import BlaschkeProduct, RationalFn, grid_for
from .embedding import (
    DiskMeasure,
    check_solid,
    default_support,
    differentiation_operator,
    extrapolation_doubling_check,
    identity_operator,
    littlewood_paley_energy,
    lp_counterexample_sweep,
    maximal_operator_spec,
    stolz_regions,
)
from .endpoint import endpoint_blowup_sweep, fa_norms, fa_norms_quadrature, sup_norm_square
from .fourier import (
    AnalyticPoly,
    CircleGrid,
    conjugate_function,
    lp_norm,
    pichorides_A,
)
from .quasi_square import quasi_square, verify_superquadratic, verify_norm_bounds
from .real_parts import band_for, check_real_part, complete_to_model, real_part_coeffs
from .sampling import random_blaschke, random_model_element, random_poly, random_real_trig

SIZES = {
    "quick": dict(polys=50, rationals=10, trig=100, real_parts=20, doubling=3, solid=20, lp_polys=50, sup=20),
    "full": dict(polys=500, rationals=100, trig=1000, real_parts=200, doubling=20, solid=200, lp_polys=500, sup=100),
}

SUITE_NAMES = ("exact_values", "superquadratic", "norm_bounds", "conjugation", "real_parts",
               "endpoint", "doubling", "solidity", "littlewood_paley", "sup_norm")


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    margins: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = {"name": self.name, "passed": self.passed, "cases": self.cases, "margins": self.margins}
        if timing:
            out["seconds"] = self.seconds
        return out


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, SUITE_NAMES.index(name)])


def poly_corpus(rng, count: int, max_degree: int = 64) -> list[AnalyticPoly]:
    return [random_poly(rng, int(rng.integers(0, max_degree + 1))) for _ in range(count)]


def rational_corpus(rng, count: int, max_degree: int = 8) -> list[tuple[RationalFn, BlaschkeProduct]]:
    out = []
    for _ in range(count):
        theta = random_blaschke(rng, int(rng.integers(1, max_degree + 1)))
        out.append((random_model_element(rng, theta), theta))
    return out


def suite_exact_values(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    errs = []
    errs.append(np.max(np.abs(quasi_square(AnalyticPoly([1, 1])).coeffs - [2, 2])))
    errs.append(np.max(np.abs(quasi_square(AnalyticPoly([0, 1])).trimmed().coeffs - [1])))
    c = 0.3 - 1.2j
    errs.append(np.max(np.abs(quasi_square(AnalyticPoly([c])).coeffs - [abs(c) ** 2])))
    for a in (0.3, 0.6, 0.9):
        s = quasi_square(RationalFn([1.0], [1.0, -a]))
        scale = s.denominator.coeffs[0]
        num = s.numerator.coeffs / scale
        target = np.array([1.0, a]) / (1 - a * a)
        errs.append(np.max(np.abs(num - target)))
        errs.append(np.max(np.abs(s.denominator.coeffs / scale - [1.0, -a])))
    worst = float(max(errs))
    return SuiteResult("exact_values", worst < 1e-12, len(errs), {"max_coeff_error": worst})


def suite_superquadratic(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "superquadratic")
    polys = poly_corpus(rng, sizes["polys"])
    grid.require_band(2 * max(p.degree for p in polys))
    worst_margin, worst_hom, n = math.inf, 0.0, 0
    for f in polys:
        lam = complex(rng.normal(), rng.normal())
        r = verify_superquadratic(quasi_square, f, lam, grid, n_interior=128, rng=rng)
        worst_margin, worst_hom, n = min(worst_margin, r.lower_margin), max(worst_hom, r.homogeneity_error), n + 1
    for f, theta in rational_corpus(rng, sizes["rationals"]):
        lam = complex(rng.normal(), rng.normal())
        g = grid_for(f) if grid.size < 4096 else grid
        r = verify_superquadratic(quasi_square, f, lam, g, n_interior=128, rng=rng)
        worst_margin, worst_hom, n = min(worst_margin, r.lower_margin), max(worst_hom, r.homogeneity_error), n + 1
    ok = worst_margin >= -1e-10 and worst_hom <= 1e-10
    return SuiteResult("superquadratic", ok, n, {"min_lower_margin": worst_margin, "max_homogeneity_error": worst_hom})


def suite_norm_bounds(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "norm_bounds")
    ps = (2.5, 3.0, 4.0, 6.0, 8.0)
    worst_ratio, worst_member, n = 0.0, 0.0, 0
    ok = True
    batches = [(f, None) for f in poly_corpus(rng, sizes["polys"])]
    for f, theta in rational_corpus(rng, sizes["rationals"]):
        batches += [(f, None), (f, theta)]
    for f, th in batches:
        for r in verify_norm_bounds(f, ps, th):
            worst_ratio = max(worst_ratio, r.output_norm / r.bound if r.bound else 0.0)
            worst_member = max(worst_member, r.membership_residual or 0.0)
            ok &= r.passed
            n += 1
    ok &= worst_ratio <= 1 + 1e-8 and worst_member < tol
    return SuiteResult("norm_bounds", bool(ok), n, {"max_norm_over_bound": worst_ratio, "max_membership": worst_member})


def suite_conjugation(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "conjugation")
    worst = 0.0
    n = 0
    for _ in range(sizes["trig"]):
        u = random_real_trig(rng, int(rng.integers(1, 33)))
        v = conjugate_function(u)
        g = CircleGrid(max(grid.size, 256))
        su, sv = u.samples(g), v.samples(g)
        for p in (4 / 3, 2.0, 3.0, 4.0):
            nu = lp_norm(su, p)
            if nu > 0:
                worst = max(worst, lp_norm(sv, p) / (pichorides_A(p) * nu))
            n += 1
    return SuiteResult("conjugation", worst <= 1 + 1e-12, n, {"max_ratio_over_A_p": worst})


def suite_real_parts(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "real_parts")
    worst_err, worst_energy, n = 0.0, 0.0, 0
    ok = True
    for origin in (True, False):
        for _ in range(sizes["real_parts"]):
            theta = random_blaschke(rng, int(rng.integers(1, 6)), origin=origin, min_abs_at_zero=0.05)
            f = random_model_element(rng, theta)
            u = real_part_coeffs(f, band_for(f))
            w = check_real_part(u, theta)
            ok &= w.verdict
            worst_energy = max(worst_energy, w.energy)
            if w.verdict:
                g = complete_to_model(u, theta)
                pts = CircleGrid(64).nodes * 0.9
                err = float(np.max(np.abs(g(pts) - f(pts))))
                if origin:
                    # any imaginary constant is allowed in case a
                    err = float(np.max(np.abs((g(pts) - f(pts)) - (g(0) - f(0)))))
                worst_err = max(worst_err, err / max(float(np.max(np.abs(f(pts)))), 1e-300))
            n += 1
    ok &= worst_err < tol
    return SuiteResult("real_parts", bool(ok), n, {"max_roundtrip_error": worst_err, "max_energy": worst_energy})


def suite_endpoint(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    table = endpoint_blowup_sweep(strict=False)
    r = table.ratios
    growth = r[-1] / r[2]
    worst_span = max(s.span_residual for s in table.samples)
    worst_member = max(s.membership for s in table.samples)
    hardy_ok = all(s.hardy_bound <= s.l1_norm for s in table.samples)
    quad_err = 0.0
    for a in (0.5, 0.9, 0.99, 0.999):
        l2, l4 = fa_norms(a)
        q2, q4, _ = fa_norms_quadrature(a)
        quad_err = max(quad_err, abs(q2 - l2) / l2, abs(q4 - l4) / l4)
    ok = table.increasing and growth >= 2 and hardy_ok and worst_span < tol and worst_member < tol and quad_err < tol
    return SuiteResult("endpoint", bool(ok), len(r), {"growth_ratio": growth, "max_span_residual": worst_span,
                                                      "max_membership": worst_member, "max_closed_form_error": quad_err})


def suite_doubling(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "doubling")
    worst, worst_pt = 0.0, -math.inf
    ok = True
    for i in range(sizes["doubling"]):
        theta = random_blaschke(rng, int(rng.integers(1, 5)))
        k = int(rng.integers(1, 9))
        mu = DiskMeasure([complex(z) for z in 0.95 * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))],
                         rng.uniform(0.1, 2.0, size=k))
        rep = extrapolation_doubling_check(theta, mu, samples=50, seed=seed + i)
        worst = max(worst, rep.m_high / rep.bound)
        worst_pt = max(worst_pt, rep.pointwise_worst)
        ok &= rep.passed
    return SuiteResult("doubling", bool(ok), sizes["doubling"], {"max_high_over_bound": worst,
                                                                  "max_pointwise_excess": worst_pt})


def suite_solidity(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "solidity")
    theta = random_blaschke(rng, 2)
    ident = check_solid(identity_operator(default_support(rng)), theta, sizes["solid"], seed)
    maxi = check_solid(maximal_operator_spec(stolz_regions(CircleGrid(64))), theta, sizes["solid"], seed)
    diff = check_solid(differentiation_operator(default_support(rng)), theta, 1, seed)
    falsified = diff.witness.counterexample is not None
    ok = ident.claims_hold and maxi.claims_hold and falsified
    return SuiteResult("solidity", bool(ok), 2 * sizes["solid"] + 1,
                       {"identity": ident.claims_hold, "maximal": maxi.claims_hold,
                        "differentiation_falsified": falsified})


def suite_littlewood_paley(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "littlewood_paley")
    worst = 0.0
    for f in poly_corpus(rng, sizes["lp_polys"]):
        norm2 = float(np.sum(np.abs(f.coeffs) ** 2))
        if norm2 > 0:
            worst = max(worst, littlewood_paley_energy(f) / (np.pi / 2 * norm2))
    sweep = lp_counterexample_sweep()
    ok = worst <= 1.0 and sweep.band_stable
    return SuiteResult("littlewood_paley", bool(ok), sizes["lp_polys"] + len(sweep.rows),
                       {"max_energy_over_bound": worst, "consecutive_ratios": sweep.consecutive_ratios})


def suite_sup_norm(seed: int, sizes: dict, grid: CircleGrid, tol: float) -> SuiteResult:
    rng = _rng(seed, "sup_norm")
    worst = 0.0
    for f in poly_corpus(rng, sizes["sup"]):
        s = f.samples(grid)
        m = lp_norm(s, np.inf)
        out = lp_norm(sup_norm_square(s), np.inf)
        worst = max(worst, abs(out - m * m) / max(m * m, 1e-300))
    return SuiteResult("sup_norm", worst <= 4 * np.finfo(float).eps, sizes["sup"], {"max_relative_error": worst})


SUITES = {
    "exact_values": suite_exact_values,
    "superquadratic": suite_superquadratic,
    "norm_bounds": suite_norm_bounds,
    "conjugation": suite_conjugation,
    "real_parts": suite_real_parts,
    "endpoint": suite_endpoint,
    "doubling": suite_doubling,
    "solidity": suite_solidity,
    "littlewood_paley": suite_littlewood_paley,
    "sup_norm": suite_sup_norm,
}


def run_suites(seed: int = 0, sizes: str = "quick", grid: int = 4096, tol: float = 1e-8,
               only=None) -> list[SuiteResult]:
    preset = SIZES[sizes]
    g = CircleGrid(grid)
    results = []
    for name in SUITE_NAMES:
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        res = SUITES[name](seed, preset, g, tol)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
