"""Embeddings of model spaces into ``L^q(mu)`` and solid sublinear operators.

An operator ``T`` is sublinear when ``|T(f+g)| <= |Tf| + |Tg|`` and
``|T(c f)| = |c| |Tf|``; it is solid when in addition ``|Tf|^2 <= gamma |T(f^2)|``
and ``|F| <= |G|`` implies ``|TF| <= |TG|``.  The identity and maximal
operators over fixed regions are solid; differentiation is not.

Every operator here is represented on a finite support by evaluation rows:
``|Tf|(x) = max_r |<row_r(x), c>|`` where ``c`` are the Malmquist--Takenaka
coefficients of ``f``.  This covers point evaluation (one row), maximal
functions (one row per cloud point) and differentiation (one row of basis
derivatives), and lets a single optimizer compute embedding norms.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh
from scipy.special import roots_legendre

from .blaschke import BlaschkeProduct, RationalFn, grid_for
from .fourier import (
    AnalyticPoly,
    BoundarySamples,
    CircleGrid,
    b_constant,
    next_pow2,
)
from .endpoint import refined_mean
from .model_space import ModelSpace, membership_residual
from .quasi_square import interior_points, quasi_square_shifted


class QuadratureError(RuntimeError):
    """Area quadrature did not converge."""


class EmptyRegionWarning(UserWarning):
    pass


# ---------------------------------------------------------------- measures


@dataclass(frozen=True)
class DiskMeasure:
    """Finite positive measure on the closed disk, stored as weighted atoms."""

    points: np.ndarray
    weights: np.ndarray
    tag: str | None = None

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if pts.shape != w.shape:
            raise ValueError("points and weights must have the same length")
        if pts.size == 0:
            raise ValueError("measure needs at least one atom")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be positive and finite")
        if np.any(np.abs(pts) > 1 + 1e-12):
            raise ValueError("atoms must lie in the closed unit disk")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def atoms(cls, pairs) -> "DiskMeasure":
        pairs = list(pairs)
        return cls(np.array([z for z, _ in pairs], dtype=complex), np.array([w for _, w in pairs], dtype=float))

    @classmethod
    def atom(cls, z, w: float = 1.0) -> "DiskMeasure":
        return cls(np.array([z], dtype=complex), np.array([w], dtype=float))

    @classmethod
    def circle(cls, grid: CircleGrid | int) -> "DiskMeasure":
        """Grid realization of normalized arc length ``m``."""
        if isinstance(grid, int):
            grid = CircleGrid(grid)
        return cls(grid.nodes, np.full(grid.size, grid.weight), tag=f"circle:{grid.size}")

    @classmethod
    def polar(cls, radial_weight: Callable = lambda r: 1.0 - r, n_angular: int = 256,
              levels: int = 8, nodes_per_level: int = 16) -> "DiskMeasure":
        """Quadrature for ``radial_weight(|z|) dA(z)`` (unnormalized area).

        Radius: Gauss--Legendre on the dyadic intervals ``[0, 1/2], [1/2, 3/4], ...``
        and a final ``[1 - 2^-levels, 1]``; angle: uniform nodes.
        """
        r, wr = graded_radial_rule(levels, nodes_per_level)
        wr = wr * r * np.asarray(radial_weight(r), dtype=float) * np.ones_like(r)
        keep = wr > 0
        r, wr = r[keep], wr[keep]
        t = 2 * np.pi * np.arange(n_angular) / n_angular
        pts = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
        w = np.repeat(wr * (2 * np.pi / n_angular), n_angular)
        return cls(pts, w, tag=f"polar:{levels}x{nodes_per_level}x{n_angular}")

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def scaled(self, t: float) -> "DiskMeasure":
        return DiskMeasure(self.points, t * self.weights, self.tag)

    def with_atom(self, z, w: float) -> "DiskMeasure":
        return DiskMeasure(np.append(self.points, complex(z)), np.append(self.weights, float(w)), None)

    def integrate(self, values) -> complex:
        return np.sum(self.weights * values)

    def check_for(self, theta: BlaschkeProduct, tol: float = 1e-12) -> None:
        """Reject atoms where basis functions of ``K_theta`` are singular."""
        den = theta.denominator()(self.points)
        if np.any(np.abs(den) < tol):
            raise ValueError("atom at a boundary singularity of theta")

    def to_json(self) -> dict:
        return {"atoms": [{"z": [float(z.real), float(z.imag)], "w": float(w)}
                          for z, w in zip(self.points, self.weights)]}

    @classmethod
    def from_json(cls, data: dict) -> "DiskMeasure":
        atoms = data["atoms"]
        return cls(np.array([complex(*a["z"]) for a in atoms]), np.array([float(a["w"]) for a in atoms]))


def graded_radial_rule(levels: int, nodes_per_level: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss--Legendre rule on ``[0, 1]`` graded towards ``r = 1``."""
    x, w = roots_legendre(nodes_per_level)
    edges = [0.0] + [1.0 - 2.0 ** -k for k in range(1, levels + 1)] + [1.0]
    rs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rs.append(lo + (hi - lo) * (x + 1) / 2)
        ws.append(w * (hi - lo) / 2)
    return np.concatenate(rs), np.concatenate(ws)


# ---------------------------------------------------------------- regions


@dataclass
class RegionFamily:
    """Sample clouds ``Omega_zeta`` attached to anchor points on the circle."""

    anchors: np.ndarray
    clouds: list

    def __len__(self):
        return len(self.clouds)


def stolz_regions(anchors, aperture: float = 1.0, depth: float = 0.5, truncation: float = 0.05,
                  n_radial: int = 6, n_angular: int = 5) -> RegionFamily:
    """Truncated cones touching the circle near each anchor.

    The cloud at ``zeta`` is ``zeta (1 - s) e^{i phi}`` with ``s`` between
    ``truncation`` and ``depth`` and ``|phi| <= aperture * s``, so the cone
    narrows as it approaches ``zeta``.
    """
    if isinstance(anchors, CircleGrid):
        anchors = anchors.nodes
    anchors = np.asarray(anchors, dtype=complex)
    s = np.linspace(truncation, depth, n_radial)
    frac = np.linspace(-1.0, 1.0, n_angular) if n_angular > 1 else np.zeros(1)
    base = ((1 - s)[:, None] * np.exp(1j * aperture * s[:, None] * frac[None, :])).ravel()
    return RegionFamily(anchors, [a * base for a in anchors])


def fixed_regions(anchors, points) -> RegionFamily:
    """Every anchor gets the same cloud."""
    if isinstance(anchors, CircleGrid):
        anchors = anchors.nodes
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    return RegionFamily(np.asarray(anchors, dtype=complex), [pts] * len(anchors))


def radial_regions(anchors, radii) -> RegionFamily:
    if isinstance(anchors, CircleGrid):
        anchors = anchors.nodes
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    return RegionFamily(np.asarray(anchors, dtype=complex), [z * radii for z in anchors])


def _sup_over(f, clouds) -> np.ndarray:
    out = np.zeros(len(clouds))
    sizes = np.array([len(c) for c in clouds])
    full = np.flatnonzero(sizes)
    empty = len(clouds) - full.size
    if full.size:
        vals = np.abs(f(np.concatenate([np.asarray(clouds[j], dtype=complex) for j in full])))
        starts = np.concatenate([[0], np.cumsum(sizes[full])[:-1]])
        out[full] = np.maximum.reduceat(vals, starts)
    if empty:
        warnings.warn(f"{empty} empty region(s); their value is set to 0", EmptyRegionWarning, stacklevel=3)
    return out


def maximal_operator(f, grid: CircleGrid | None = None, regions: RegionFamily | None = None) -> BoundarySamples:
    """``(Tf)(zeta) = sup{|f(z)| : z in Omega_zeta}`` at each grid node."""
    if regions is None:
        grid = grid or CircleGrid(256)
        regions = stolz_regions(grid)
    if grid is None:
        grid = CircleGrid(len(regions))
    if len(regions) != grid.size:
        raise ValueError("need one region per grid node")
    return BoundarySamples(grid, _sup_over(f, regions.clouds).astype(complex))


# ---------------------------------------------------------------- operators


@dataclass
class SolidOperatorSpec:
    """A sublinear operator on a finite support.

    ``apply(f)`` returns ``|Tf|`` at the support points for any callable
    analytic ``f``; ``rows(space)`` returns, for each support point, the
    evaluation rows in the Malmquist--Takenaka basis (shape
    ``(points, rows, dim)``).
    """

    name: str
    apply: Callable
    rows: Callable
    support: np.ndarray
    gamma: float = 1.0
    claims: tuple = ("subadditive", "homogeneous", "square", "monotone")


def _basis_at(space: ModelSpace, pts: np.ndarray) -> np.ndarray:
    return space.evaluate_basis(pts.ravel()).reshape(pts.shape + (space.dimension,))


def identity_operator(support) -> SolidOperatorSpec:
    support = np.atleast_1d(np.asarray(support, dtype=complex))
    return SolidOperatorSpec(
        name="identity",
        apply=lambda f: np.abs(f(support)),
        rows=lambda space: _basis_at(space, support[:, None]),
        support=support,
    )


def maximal_operator_spec(regions: RegionFamily) -> SolidOperatorSpec:
    width = max(len(c) for c in regions.clouds)
    if width == 0:
        raise ValueError("all regions are empty")
    # pad every cloud by repeating its first point; duplicates do not change a max
    padded = np.array([np.resize(c, width) if len(c) else np.zeros(width) for c in regions.clouds])
    return SolidOperatorSpec(
        name="maximal",
        apply=lambda f: _sup_over(f, regions.clouds),
        rows=lambda space: _basis_at(space, padded),
        support=regions.anchors,
    )


def differentiation_operator(support) -> SolidOperatorSpec:
    support = np.atleast_1d(np.asarray(support, dtype=complex))

    def rows(space):
        ders = [e.derivative() for e in space.basis]
        return np.stack([d(support) for d in ders], axis=-1)[:, None, :]

    return SolidOperatorSpec(
        name="differentiation",
        apply=lambda f: np.abs(f.derivative()(support)),
        rows=rows,
        support=support,
        claims=("subadditive", "homogeneous"),
    )


def default_support(rng: np.random.Generator, interior: int = 64, boundary: int = 64) -> np.ndarray:
    return np.concatenate([interior_points(rng, interior), CircleGrid(boundary).nodes])


# ---------------------------------------------------------------- solidity


@dataclass
class PropertyResult:
    name: str
    trials: int = 0
    worst: float = -math.inf
    counterexample: str | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def record(self, excess: float, slack: float, note: str) -> None:
        self.trials += 1
        self.worst = max(self.worst, excess)
        if excess > slack and self.counterexample is None:
            self.counterexample = f"{note}: excess {excess:.3e}"


@dataclass
class SolidReport:
    operator: str
    gamma: float
    properties: dict
    witness: PropertyResult

    @property
    def claims_hold(self) -> bool:
        return all(self.properties[k].passed for k in self.properties if k in self._claims)

    _claims: tuple = ()

    def to_json(self) -> dict:
        return {
            "operator": self.operator,
            "gamma": self.gamma,
            "claims_hold": self.claims_hold,
            "properties": {k: {"passed": v.passed, "trials": v.trials, "worst": v.worst,
                               "counterexample": v.counterexample} for k, v in self.properties.items()},
            "witness": {"passed": self.witness.passed, "counterexample": self.witness.counterexample},
        }


def _sum(f, g):
    return f + g


def check_solid(op: SolidOperatorSpec, theta: BlaschkeProduct, trials: int = 200,
                seed: int = 0, slack: float = 1e-10) -> SolidReport:
    """Randomized falsification of the four contracts.

    Inputs are random elements of ``K_{theta^2}``.  Squares for the third
    contract are formed at coefficient level from ``f`` in ``K_theta`` and
    their membership in ``K_{theta^2}`` is verified first.  Monotonicity is
    probed with pairs ``(t G, G)``, ``|t| <= 1``, and ``(f^2, S_theta f)``.
    Finally the pair ``F = z``, ``G = 1`` is applied as a fixed witness.
    """
    rng = np.random.default_rng(seed)
    big = ModelSpace(theta.square())
    small = ModelSpace(theta)
    props = {k: PropertyResult(k) for k in ("subadditive", "homogeneous", "square", "monotone")}
    for i in range(trials):
        f = big.random_element(rng)
        g = big.random_element(rng)
        tf, tg = op.apply(f), op.apply(g)
        scale = max(float(np.max(tf)), float(np.max(tg)), 1e-300)
        props["subadditive"].record(float(np.max(op.apply(_sum(f, g)) - tf - tg)) / scale, slack, f"trial {i}")
        lam = complex(rng.normal(), rng.normal())
        props["homogeneous"].record(float(np.max(np.abs(op.apply(lam * f) - abs(lam) * tf))) / (abs(lam) * scale),
                            slack, f"trial {i}")
        h = small.random_element(rng)
        h2 = h.square()
        if membership_residual(h2, big.theta) > 1e-8:
            raise AssertionError("square of a K_theta element fell outside K_theta^2")
        th = op.apply(h)
        props["square"].record(float(np.max(th ** 2 - op.gamma * op.apply(h2))) / max(float(np.max(th)) ** 2, 1e-300),
                            slack, f"trial {i}")
        t = rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        props["monotone"].record(float(np.max(op.apply(t * f) - tf)) / scale, slack, f"trial {i} (tG, G)")
        sh = quasi_square_shifted(h, theta)
        tsh = op.apply(sh)
        props["monotone"].record(float(np.max(op.apply(h2) - tsh)) / max(float(np.max(tsh)), 1e-300),
                            slack, f"trial {i} (f^2, S_theta f)")
    # fixed witness: |z| <= |1| on the closed disk
    witness = PropertyResult("monotone witness F=z, G=1")
    F = AnalyticPoly([0.0, 1.0])
    G = AnalyticPoly([1.0])
    excess = float(np.max(op.apply(F) - op.apply(G)))
    witness.record(excess, slack, "F = z, G = 1")
    if witness.counterexample is not None:
        props["monotone"].counterexample = props["monotone"].counterexample or witness.counterexample
    report = SolidReport(op.name, op.gamma, props, witness)
    report._claims = op.claims
    return report


# ---------------------------------------------------------------- embedding norms


@dataclass
class EmbeddingNorm:
    value: float
    coeffs: np.ndarray
    method: str
    stationarity: float = 0.0
    eigen_start: bool = False
    lower_bound: bool = False
    starts: int = 0

    @property
    def squared(self) -> float:
        return self.value ** 2

    def to_json(self) -> dict:
        return {"value": self.value, "squared": self.squared, "method": self.method,
                "stationarity": self.stationarity, "eigen_start": self.eigen_start,
                "lower_bound": self.lower_bound, "starts": self.starts,
                "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}


P_INF_SURROGATE = 64.0


class _Objective:
    """``log(||Tf||_{L^q(mu)} / ||f||_p)`` on MT coefficients, with its gradient."""

    def __init__(self, rows: np.ndarray, weights: np.ndarray, q: float,
                 boundary: np.ndarray, p: float):
        self.rows = rows              # (points, r, dim)
        self.w = weights
        self.q = q
        self.B = boundary             # (N, dim)
        self.p = p

    def _tvals(self, c):
        vals = self.rows @ c          # (points, r)
        idx = np.argmax(np.abs(vals), axis=1)
        picked = vals[np.arange(vals.shape[0]), idx]
        return picked, idx

    def value(self, c, p=None) -> float:
        p = self.p if p is None else p
        y, _ = self._tvals(c)
        b = self.B @ c
        top = np.sum(self.w * np.abs(y) ** self.q) ** (1 / self.q)
        if np.isinf(p):
            bottom = np.max(np.abs(b))
        else:
            bottom = np.mean(np.abs(b) ** p) ** (1 / p)
        return float(top / bottom)

    def log_and_grad(self, c):
        y, idx = self._tvals(c)
        b = self.B @ c
        ay = np.maximum(np.abs(y), 1e-300)
        ab = np.maximum(np.abs(b), 1e-300)
        F = np.sum(self.w * ay ** self.q)
        P = np.mean(ab ** self.p)
        R = self.rows[np.arange(self.rows.shape[0]), idx]   # (points, dim)
        g = (R.conj().T @ (self.w * ay ** (self.q - 2) * y)) / F \
            - (self.B.conj().T @ (ab ** (self.p - 2) * b)) / (len(b) * P)
        val = np.log(F) / self.q - np.log(P) / self.p
        return float(val), g


def _ascent(obj: _Objective, c0: np.ndarray, tol: float, maxiter: int):
    c = c0 / np.linalg.norm(c0)
    val, g = obj.log_and_grad(c)
    step = 0.5
    for _ in range(maxiter):
        gn = np.linalg.norm(g)
        if gn < 1e-15:
            break
        improved = False
        while step > 1e-14:
            cand = c + step * g / gn
            cand /= np.linalg.norm(cand)
            cval, cg = obj.log_and_grad(cand)
            if cval > val:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        gain = math.expm1(cval - val)
        c, val, g = cand, cval, cg
        step = min(step * 2.0, 1.0)
        if gain < tol:
            break
    stat = float(np.linalg.norm(g))
    return c, stat


def _support_rows(space: ModelSpace, mu: DiskMeasure, op: SolidOperatorSpec | None) -> np.ndarray:
    if op is None:
        return _basis_at(space, mu.points[:, None])
    rows = op.rows(space)
    if rows.shape[0] != mu.size:
        raise ValueError("operator support and measure atoms differ in number")
    return rows


def _boundary_matrix(space: ModelSpace, grid: CircleGrid | None) -> np.ndarray:
    if grid is None:
        grid = grid_for(space.theta)
    return space.evaluate_basis(grid.nodes)


def embedding_norm(theta: BlaschkeProduct, p: float, q: float, mu: DiskMeasure,
                   op: SolidOperatorSpec | None = None, starts: int = 32, seed: int = 0,
                   tol: float = 1e-8, maxiter: int = 5000, grid: CircleGrid | None = None) -> EmbeddingNorm:
    """``sup ||Tf||_{L^q(mu)} / ||f||_p`` over ``f`` in ``K_theta`` (``T`` = identity by default).

    ``p = q = 2`` with the identity is solved exactly as the top eigenvalue
    of the measure Gram matrix against the circle Gram matrix.  Other
    exponents use multi-start normalized gradient ascent (the first start is
    the ``p = q = 2`` eigenvector, the rest are seeded random); the reported
    value is the objective at an explicit ``f``, hence a lower bound for the
    supremum, and ``stationarity`` is the final gradient norm.
    """
    if not (p > 1):
        raise ValueError("p must exceed 1")
    if not (q > 0):
        raise ValueError("q must be positive")
    mu.check_for(theta)
    space = ModelSpace(theta)
    rows = _support_rows(space, mu, op)

    if np.isinf(q):
        best = None
        for j in range(mu.size):
            single = DiskMeasure(mu.points[j:j + 1], np.ones(1))
            sub = SolidOperatorSpec(op.name, op.apply, lambda s, j=j: rows[j:j + 1], op.support[j:j + 1]) if op else None
            res = embedding_norm(theta, p, 1.0, single, sub, starts, seed + j, tol, maxiter, grid)
            if best is None or res.value > best.value:
                best = res
        best.method = "pointwise-" + best.method
        return best

    B = _boundary_matrix(space, grid)
    gram = (B.conj().T @ B) / B.shape[0]
    single_row = rows.shape[1] == 1
    A = None
    if single_row:
        E = rows[:, 0, :]
        A = (E.conj().T * mu.weights) @ E
    if p == 2 and q == 2 and single_row:
        vals, vecs = eigh(A, gram)
        return EmbeddingNorm(float(np.sqrt(max(vals[-1], 0.0))), vecs[:, -1], "eigen", starts=1)

    p_opt = P_INF_SURROGATE if np.isinf(p) else p
    obj = _Objective(rows, mu.weights, q, B, p_opt)
    rng = np.random.default_rng(seed)
    inits = []
    if A is not None:
        inits.append(eigh(A, gram)[1][:, -1])
    else:
        inits.append(np.ones(space.dimension, dtype=complex))
    while len(inits) < starts:
        inits.append(rng.normal(size=space.dimension) + 1j * rng.normal(size=space.dimension))
    best_val, best_c, best_stat, best_idx = -math.inf, None, 0.0, -1
    for k, c0 in enumerate(inits):
        c, stat = _ascent(obj, c0, tol, maxiter)
        v = obj.value(c, p)
        if v > best_val:
            best_val, best_c, best_stat, best_idx = v, c, stat, k
    if np.isinf(p):
        # exact sup norm of the maximizer on a refined grid
        fine = CircleGrid(max(4 * B.shape[0], 1 << 14))
        obj_fine = _Objective(rows, mu.weights, q, space.evaluate_basis(fine.nodes), p)
        best_val = obj_fine.value(best_c, p)
    return EmbeddingNorm(float(best_val), best_c, "ascent", best_stat, best_idx == 0, True, len(inits))


def model_element(theta: BlaschkeProduct, coeffs) -> RationalFn:
    return ModelSpace(theta).element(coeffs)


# ---------------------------------------------------------------- extrapolation


def doubling_constant(sigma: float, theta: BlaschkeProduct) -> float:
    """``C(sigma, theta) = B_{2 sigma} ((1+|w|)/(1-|w|))^2`` with ``w = theta(0)``."""
    w = abs(theta.at_zero)
    return b_constant(2 * sigma) * ((1 + w) / (1 - w)) ** 2


@dataclass
class DoublingReport:
    sigma: float
    tau: float
    gamma: float
    constant: float
    m_low: float
    m_high: float
    low_exact: bool
    pointwise_worst: float
    pointwise_samples: int

    @property
    def bound(self) -> float:
        return math.sqrt(self.gamma * self.constant * self.m_low)

    @property
    def holds(self) -> bool:
        return self.m_high <= self.bound * (1 + 1e-6)

    @property
    def pointwise_holds(self) -> bool:
        return self.pointwise_worst <= 1e-10

    @property
    def passed(self) -> bool:
        return self.holds and self.pointwise_holds

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "tau": self.tau, "gamma": self.gamma, "constant": self.constant,
                "M_low": self.m_low, "M_high": self.m_high, "bound": self.bound,
                "low_exact": self.low_exact, "holds": self.holds,
                "pointwise_worst": self.pointwise_worst, "pointwise_holds": self.pointwise_holds}


def extrapolation_doubling_check(theta: BlaschkeProduct, mu: DiskMeasure, sigma: float = 2.0,
                                 tau: float = 2.0, op: SolidOperatorSpec | None = None,
                                 samples: int = 50, seed: int = 0, starts: int = 32) -> DoublingReport:
    """Compare ``M(2 sigma, 2 tau)`` with ``sqrt(gamma C M(sigma, tau))``.

    ``M(2 sigma, 2 tau)`` is an optimizer lower bound; ``M(sigma, tau)`` is
    exact for the identity at ``sigma = tau = 2`` and an optimizer value
    otherwise (``low_exact`` records which).  Also checks the pointwise step
    ``|Tf|^2 <= gamma |T(S_theta f)|`` on the support for sampled ``f``.
    """
    if not (1 < sigma < math.inf) or not (1 <= tau < math.inf):
        raise ValueError("need 1 < sigma < inf and 1 <= tau < inf")
    gamma = 1.0 if op is None else op.gamma
    low = embedding_norm(theta, sigma, tau, mu, op, starts=starts, seed=seed)
    high = embedding_norm(theta, 2 * sigma, 2 * tau, mu, op, starts=starts, seed=seed + 1)
    apply = op.apply if op is not None else (lambda f: np.abs(f(mu.points)))
    rng = np.random.default_rng(seed + 2)
    space = ModelSpace(theta)
    worst = -math.inf
    for _ in range(samples):
        f = space.random_element(rng)
        tf = apply(f)
        ts = apply(quasi_square_shifted(f, theta))
        worst = max(worst, float(np.max((tf ** 2 - gamma * ts) / np.maximum(tf ** 2, 1e-300))))
    return DoublingReport(sigma, tau, gamma, doubling_constant(sigma, theta), low.value, high.value,
                          low.method == "eigen", worst, samples)


@dataclass
class DoublingChain:
    exponents: list
    values: list
    upper: list

    @property
    def holds(self) -> bool:
        return all(v <= u * (1 + 1e-6) for v, u in zip(self.values, self.upper))


def doubling_chain(theta: BlaschkeProduct, mu: DiskMeasure, levels: int = 3,
                   seed: int = 0, starts: int = 32) -> DoublingChain:
    """``M(2^k, 2^k)`` for ``k = 1..levels`` against the iterated upper bounds.

    ``U(2) = M(2, 2)`` exactly and ``U(2^{k+1}) = sqrt(C(2^k, theta) U(2^k))``.
    """
    exps = [2.0 ** k for k in range(1, levels + 1)]
    values, upper = [], []
    for k, s in enumerate(exps):
        values.append(embedding_norm(theta, s, s, mu, starts=starts, seed=seed + k).value)
        if k == 0:
            upper.append(values[0])
        else:
            upper.append(math.sqrt(doubling_constant(exps[k - 1], theta) * upper[-1]))
    return DoublingChain(exps, values, upper)


# ---------------------------------------------------------------- Littlewood--Paley


def littlewood_paley_energy(f: AnalyticPoly) -> float:
    """``int |f'|^2 (1-|z|) dA = pi sum_k k |a_k|^2 / (2k+1)`` for a polynomial."""
    if not isinstance(f, AnalyticPoly):
        raise TypeError("closed form needs a polynomial")
    k = np.arange(len(f.coeffs))
    return float(np.pi * np.sum(k * np.abs(f.coeffs) ** 2 / (2 * k + 1)))


def area_integral(func: Callable, n_angular: int, levels: int, nodes_per_level: int,
                  radial_weight: Callable = lambda r: 1.0 - r) -> float:
    """``int func(z) radial_weight(|z|) dA`` by the graded polar rule, evaluated ring by ring."""
    r, wr = graded_radial_rule(levels, nodes_per_level)
    wr = wr * r * np.asarray(radial_weight(r), dtype=float) * np.ones_like(r)
    ring = np.exp(2j * np.pi * np.arange(n_angular) / n_angular)
    total = 0.0
    for ri, wi in zip(r, wr):
        if wi == 0:
            continue
        total += wi * np.mean(func(ri * ring))
    return float(np.real(total) * 2 * np.pi)


def refined_area_integral(func: Callable, scale: float, tol: float = 1e-10,
                          radial_weight: Callable = lambda r: 1.0 - r, max_rounds: int = 4):
    """:func:`area_integral` refined until two levels agree to ``tol``.

    ``scale`` is the width of the sharpest feature (``1 - |a|`` for ``f_a``);
    it sets the initial angular resolution and radial grading depth.
    """
    n_ang = max(256, next_pow2(int(math.ceil(64.0 / scale))))
    levels = max(4, int(math.ceil(math.log2(1.0 / scale))) + 4)
    nodes = 16
    prev = area_integral(func, n_ang, levels, nodes, radial_weight)
    for _ in range(max_rounds):
        n_ang, levels, nodes = 2 * n_ang, levels + 2, 2 * nodes
        cur = area_integral(func, n_ang, levels, nodes, radial_weight)
        if abs(cur - prev) <= tol * abs(cur):
            return cur, n_ang
        prev = cur
    raise QuadratureError(f"area quadrature not converged (last change {abs(cur - prev) / abs(cur):.2e})")


@dataclass
class LPRow:
    a: float
    norm3_cubed: float
    energy3: float
    N_used: int

    @property
    def R(self) -> float:
        return self.energy3 / self.norm3_cubed

    @property
    def scaled(self) -> float:
        return self.R * (1.0 - self.a)


@dataclass
class LPSweep:
    rows: list

    @property
    def consecutive_ratios(self) -> list:
        s = [r.scaled for r in self.rows]
        return [y / x for x, y in zip(s, s[1:])]

    @property
    def band_stable(self) -> bool:
        return all(0.5 <= t <= 2.0 for t in self.consecutive_ratios)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "norm3_cubed", "energy3", "R(a)", "R(a)*(1-a)", "N_used"])
        for r in self.rows:
            w.writerow([repr(r.a), *(format(v, ".17g") for v in (r.norm3_cubed, r.energy3, r.R, r.scaled)), r.N_used])
        return buf.getvalue()


def lp_counterexample_sweep(a_values=(0.9, 0.95, 0.99), tol: float = 1e-10, strict: bool = False) -> LPSweep:
    """``R(a) = ||f_a||_3^{-3} int |f_a'|^3 (1-|z|) dA`` along real ``a``."""
    rows = []
    for a in a_values:
        a = float(a)
        if not 0 < a < 1:
            raise ValueError("a must lie in (0, 1)")
        f = RationalFn([1.0], [1.0, -a])
        df = f.derivative()
        grid = CircleGrid(max(4096, next_pow2(int(math.ceil(64.0 / (1 - a))))))
        n3, _ = refined_mean(lambda z: np.abs(f(z)) ** 3, grid, tol)
        e3, n_used = refined_area_integral(lambda z: np.abs(df(z)) ** 3, 1 - a, tol)
        rows.append(LPRow(a, float(np.real(n3)), e3, n_used))
    sweep = LPSweep(rows)
    if strict and not sweep.band_stable:
        raise AssertionError(f"R(a)(1-a) not band-stable: {sweep.consecutive_ratios}")
    return sweep
