"""Fourier analysis on the unit circle.

Functions on the circle are handled in two representations:

* :class:`TrigCoeffs` -- a finite band of two-sided Fourier coefficients
  ``c_k``, ``|k| <= M``, representing ``zeta -> sum_k c_k zeta^k`` exactly;
* :class:`BoundarySamples` -- values on a uniform :class:`CircleGrid`.

Analytic polynomials (:class:`AnalyticPoly`) are TrigCoeffs with no negative
frequencies; they can also be evaluated anywhere in the plane.

All integrals are against normalized Lebesgue measure ``dm = |dzeta|/2pi``,
so the quadrature weight of a grid with ``N`` nodes is ``1/N``.

Conventions
-----------
The conjugation operator is the Fourier multiplier ``-i sgn(k)``; for a real
``u`` the function ``u + i Hu`` is the boundary trace of the holomorphic
function whose imaginary part vanishes at the origin.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_GRID = 4096


class GridTooSmallError(ValueError):
    """A grid cannot resolve the requested band without aliasing."""


def _as_complex_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 1:
        raise ValueError("coefficient vector must be one-dimensional")
    return arr


def _pair_list(arr: np.ndarray) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in arr]


def _from_pairs(pairs) -> np.ndarray:
    out = []
    for item in pairs:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise ValueError(f"expected [re, im] pair, got {item!r}")
            out.append(complex(item[0], item[1]))
        else:
            out.append(complex(item))
    return np.asarray(out, dtype=complex)


def next_pow2(n: int) -> int:
    return 1 << max(2, int(math.ceil(math.log2(max(n, 4)))))


@dataclass(frozen=True)
class CircleGrid:
    """Uniform grid ``exp(2 pi i k / N)``, ``k = 0..N-1``, with weight ``1/N``."""

    size: int = DEFAULT_GRID

    def __post_init__(self):
        n = self.size
        if not isinstance(n, (int, np.integer)) or n < 4 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 4, got {n!r}")

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.size) / self.size)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    @property
    def weight(self) -> float:
        return 1.0 / self.size

    def frequencies(self) -> np.ndarray:
        """Integer frequency attached to each FFT bin (Nyquist bin counts as negative)."""
        return np.fft.fftfreq(self.size, 1.0 / self.size).astype(int)

    def refine(self) -> "CircleGrid":
        return CircleGrid(2 * self.size)

    def require_band(self, band: int) -> None:
        if self.size <= 2 * band:
            raise GridTooSmallError(
                f"grid of size {self.size} cannot resolve band {band}: need N > {2 * band}"
            )


@dataclass(frozen=True)
class BoundarySamples:
    """Values of a function at the nodes of a circle grid."""

    grid: CircleGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} samples, got shape {vals.shape}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func: Callable, grid: CircleGrid | int = DEFAULT_GRID):
        if isinstance(grid, int):
            grid = CircleGrid(grid)
        return cls(grid, np.asarray(func(grid.nodes), dtype=complex))

    def __abs__(self) -> np.ndarray:
        return np.abs(self.values)

    def mean(self) -> complex:
        return complex(np.mean(self.values))


class TrigCoeffs:
    """Two-sided Fourier coefficients ``c_k`` for ``k = -M..M``.

    ``coeffs[k + M]`` holds ``c_k``.  Products grow the band exactly
    (``M1 + M2``); nothing is truncated implicitly.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = _as_complex_array(coeffs)
        if arr.size % 2 == 0:
            raise ValueError("two-sided coefficient vector must have odd length 2M+1")
        self.coeffs = arr

    @property
    def band(self) -> int:
        return (self.coeffs.size - 1) // 2

    @classmethod
    def from_dict(cls, mapping: dict[int, complex]) -> "TrigCoeffs":
        band = max((abs(k) for k in mapping), default=0)
        arr = np.zeros(2 * band + 1, dtype=complex)
        for k, c in mapping.items():
            arr[k + band] += c
        return cls(arr)

    @classmethod
    def zeros(cls, band: int) -> "TrigCoeffs":
        return cls(np.zeros(2 * band + 1, dtype=complex))

    def coef(self, k: int) -> complex:
        if abs(k) > self.band:
            return 0j
        return complex(self.coeffs[k + self.band])

    def nonnegative(self) -> np.ndarray:
        """Coefficients ``c_0..c_M``."""
        return self.coeffs[self.band:].copy()

    def negative(self) -> np.ndarray:
        """Coefficients ``c_{-M}..c_{-1}``."""
        return self.coeffs[: self.band].copy()

    def padded(self, band: int) -> "TrigCoeffs":
        if band < self.band:
            raise ValueError("padded() cannot shrink the band; use truncated()")
        extra = band - self.band
        return TrigCoeffs(np.pad(self.coeffs, (extra, extra)))

    def truncated(self, band: int) -> "TrigCoeffs":
        if band >= self.band:
            return self.padded(band)
        cut = self.band - band
        return TrigCoeffs(self.coeffs[cut: self.coeffs.size - cut])

    def trim(self, tol: float = 0.0) -> "TrigCoeffs":
        """Drop the outermost coefficient pairs whose modulus is ``<= tol``."""
        mags = np.abs(self.coeffs)
        idx = np.nonzero(mags > tol)[0]
        if idx.size == 0:
            return TrigCoeffs([0j])
        band = int(max(abs(idx[0] - self.band), abs(idx[-1] - self.band)))
        return self.truncated(band)

    def is_real(self, tol: float = 1e-12) -> bool:
        """True iff ``c_{-k} = conj(c_k)`` for every ``k`` (within ``tol``)."""
        scale = max(1.0, float(np.max(np.abs(self.coeffs), initial=0.0)))
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol * scale)

    def conj(self) -> "TrigCoeffs":
        """Coefficients of ``zeta -> conj(f(zeta))`` on the circle."""
        return TrigCoeffs(np.conj(self.coeffs[::-1]))

    def real_part(self) -> "TrigCoeffs":
        return (self + self.conj()) * 0.5

    def shift(self, j: int) -> "TrigCoeffs":
        """Multiply by ``zeta^j``."""
        m = self.band + abs(j)
        out = np.zeros(2 * m + 1, dtype=complex)
        start = m - self.band + j
        out[start: start + self.coeffs.size] = self.coeffs
        return TrigCoeffs(out)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        # Horner in zeta, then divide by zeta^M (only used on or near the circle)
        return np.polyval(self.coeffs[::-1], zeta) / zeta ** self.band

    def samples(self, grid: CircleGrid | int = DEFAULT_GRID) -> BoundarySamples:
        if isinstance(grid, int):
            grid = CircleGrid(grid)
        grid.require_band(self.band)
        spec = np.zeros(grid.size, dtype=complex)
        ks = np.arange(-self.band, self.band + 1)
        spec[ks % grid.size] = self.coeffs
        return BoundarySamples(grid, np.fft.ifft(spec) * grid.size)

    def _binary(self, other, op) -> "TrigCoeffs":
        if isinstance(other, TrigCoeffs):
            m = max(self.band, other.band)
            return TrigCoeffs(op(self.padded(m).coeffs, other.padded(m).coeffs))
        if np.isscalar(other):
            return op(self, TrigCoeffs([other]))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-1) * self + other

    def __neg__(self):
        return TrigCoeffs(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TrigCoeffs):
            return TrigCoeffs(np.convolve(self.coeffs, other.coeffs))
        if np.isscalar(other):
            return TrigCoeffs(self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TrigCoeffs):
            return NotImplemented
        m = max(self.band, other.band)
        return bool(np.array_equal(self.padded(m).coeffs, other.padded(m).coeffs))

    def allclose(self, other: "TrigCoeffs", atol: float = 1e-12) -> bool:
        m = max(self.band, other.band)
        return bool(np.max(np.abs(self.padded(m).coeffs - other.padded(m).coeffs), initial=0.0) <= atol)

    def __repr__(self):
        return f"TrigCoeffs(band={self.band})"

    def to_json(self) -> dict:
        return {"band": self.band, "coeffs": _pair_list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "TrigCoeffs":
        obj = cls(_from_pairs(data["coeffs"]))
        if "band" in data and int(data["band"]) != obj.band:
            raise ValueError(f"band {data['band']} does not match {obj.coeffs.size} coefficients")
        return obj


class AnalyticPoly:
    """Polynomial ``a_0 + a_1 z + ... + a_d z^d`` (Taylor coefficients)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = _as_complex_array(coeffs)
        if arr.size == 0:
            arr = np.zeros(1, dtype=complex)
        self.coeffs = arr

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient (0 for the null polynomial)."""
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0

    def is_null(self) -> bool:
        return not np.any(self.coeffs)

    def trimmed(self, tol: float = 0.0) -> "AnalyticPoly":
        nz = np.nonzero(np.abs(self.coeffs) > tol)[0]
        return AnalyticPoly(self.coeffs[: (nz[-1] + 1) if nz.size else 1])

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], np.asarray(z, dtype=complex))

    def taylor(self, count: int) -> np.ndarray:
        """First ``count`` Taylor coefficients."""
        out = np.zeros(count, dtype=complex)
        k = min(count, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return out

    def derivative(self) -> "AnalyticPoly":
        if self.coeffs.size == 1:
            return AnalyticPoly([0])
        return AnalyticPoly(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def to_trig(self) -> TrigCoeffs:
        d = self.coeffs.size - 1
        return TrigCoeffs(np.concatenate([np.zeros(d, dtype=complex), self.coeffs]))

    def samples(self, grid: CircleGrid | int = DEFAULT_GRID) -> BoundarySamples:
        return self.to_trig().samples(grid)

    def __add__(self, other):
        if isinstance(other, AnalyticPoly):
            n = max(self.coeffs.size, other.coeffs.size)
            return AnalyticPoly(self.taylor(n) + other.taylor(n))
        if np.isscalar(other):
            out = self.coeffs.copy()
            out[0] += other
            return AnalyticPoly(out)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return AnalyticPoly(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, AnalyticPoly):
            return AnalyticPoly(np.convolve(self.coeffs, other.coeffs))
        if np.isscalar(other):
            return AnalyticPoly(self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"AnalyticPoly(degree={self.degree})"

    def to_json(self) -> dict:
        return {"coeffs": _pair_list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "AnalyticPoly":
        return cls(_from_pairs(data["coeffs"]))


# -- grid <-> coefficients ---------------------------------------------------

def to_coeffs(samples: BoundarySamples, band: int) -> TrigCoeffs:
    """Discrete Fourier coefficients ``c_{-M}..c_M`` of gridded samples.

    Exact when the sampled function is band-limited to ``band``; otherwise
    the aliased DFT coefficients are returned.
    """
    grid = samples.grid
    grid.require_band(band)
    spec = np.fft.fft(samples.values) / grid.size
    ks = np.arange(-band, band + 1)
    return TrigCoeffs(spec[ks % grid.size])


def conjugate_function(u: TrigCoeffs) -> TrigCoeffs:
    """Harmonic conjugate: multiply ``c_k`` by ``-i sgn(k)``."""
    ks = np.arange(-u.band, u.band + 1)
    return TrigCoeffs(-1j * np.sign(ks) * u.coeffs)


def conjugate_samples(samples: BoundarySamples) -> BoundarySamples:
    """Grid version of :func:`conjugate_function` (Nyquist bin dropped)."""
    grid = samples.grid
    spec = np.fft.fft(samples.values)
    k = grid.frequencies()
    mult = -1j * np.sign(k)
    mult[grid.size // 2] = 0.0
    return BoundarySamples(grid, np.fft.ifft(spec * mult))


def riesz_projection(h: TrigCoeffs) -> AnalyticPoly:
    """Keep the nonnegative frequencies."""
    return AnalyticPoly(h.nonnegative())


def analytic_part_samples(samples: BoundarySamples) -> BoundarySamples:
    """Grid Riesz projection; the Nyquist bin is treated as a negative frequency."""
    grid = samples.grid
    spec = np.fft.fft(samples.values)
    spec[grid.frequencies() < 0] = 0.0
    return BoundarySamples(grid, np.fft.ifft(spec))


# -- norms -------------------------------------------------------------------

def _check_p(p: float) -> float:
    p = float(p)
    if not p > 0:
        raise ValueError(f"exponent p must be positive, got {p}")
    return p


def lp_norm(f: BoundarySamples, p: float) -> float:
    """``(sum |f|^p / N)^(1/p)``, or the maximum modulus when ``p`` is infinite."""
    p = _check_p(p)
    vals = np.abs(f.values)
    if not np.all(np.isfinite(vals)):
        raise ValueError("samples contain non-finite values")
    if math.isinf(p):
        return float(vals.max(initial=0.0))
    peak = vals.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    # scale out the peak to keep |f|^p in range
    return float(peak * np.mean((vals / peak) ** p) ** (1.0 / p))


def lp_norm_refined(func: Callable, p: float, grid: CircleGrid | int = DEFAULT_GRID,
                    tol: float = 1e-10, max_size: int = 1 << 22) -> tuple[float, int]:
    """L^p norm of a callable on the circle, doubling the grid until stable.

    Returns the norm and the grid size at which the relative change between
    consecutive refinements fell below ``tol``.
    """
    if isinstance(grid, int):
        grid = CircleGrid(grid)
    prev = lp_norm(BoundarySamples.from_function(func, grid), p)
    while grid.size < max_size:
        grid = grid.refine()
        cur = lp_norm(BoundarySamples.from_function(func, grid), p)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300) or cur == prev:
            return cur, grid.size
        prev = cur
    raise RuntimeError(f"L^{p} norm did not stabilise up to grid size {max_size}")


def weak_l1_quasinorm(g: BoundarySamples) -> float:
    """``sup_{lam > 0} lam * m(|g| > lam)`` for the empirical distribution of samples.

    Between consecutive distinct sample magnitudes the distribution function
    is constant, so the supremum is the left limit at a sample value:
    ``max_i s_i * #{j : |g_j| >= s_i} / N``.
    """
    mags = np.sort(np.abs(g.values))[::-1]
    if mags.size == 0 or mags[0] == 0.0:
        return 0.0
    n = mags.size
    # count of samples >= s_i, ties resolved to the last occurrence
    counts = np.searchsorted(-mags, -mags, side="right")
    return float(np.max(mags * counts / n))


# -- explicit constants --------------------------------------------------------

def pichorides_A(p: float) -> float:
    """Norm of the conjugation operator on real ``L^p``: tan(pi/2p) or cot(pi/2p)."""
    p = float(p)
    if not 1.0 < p < math.inf:
        raise ValueError(f"A_p is defined for 1 < p < infinity, got {p}")
    if p == 2.0:
        return 1.0  # conjugation is an isometry on mean-zero L^2; tan(pi/4) rounds below 1
    if p < 2.0:
        return math.tan(math.pi / (2 * p))
    return 1.0 / math.tan(math.pi / (2 * p))


def b_constant(p: float) -> float:
    """``B_p = 1 + A_{p/2}`` for ``2 < p < infinity``."""
    p = float(p)
    if not 2.0 < p < math.inf:
        raise ValueError(f"B_p is defined for 2 < p < infinity, got {p}")
    return 1.0 + pichorides_A(p / 2)


# -- extensions into the disk ------------------------------------------------

def _check_interior(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("evaluation point must lie in the open unit disk")
    return z


def herglotz_extend(u: TrigCoeffs, z):
    """``int (zeta + z)/(zeta - z) u dm = u_0 + 2 sum_{k>=1} u_k z^k``."""
    z = _check_interior(z)
    a = u.nonnegative()
    a[1:] *= 2
    return np.polyval(a[::-1], z)


def poisson_extend(u: TrigCoeffs, z):
    """Poisson integral of a real ``u`` at ``z`` (real part of the Herglotz integral)."""
    return np.real(herglotz_extend(u, z))


# -- sharpness probe for the conjugation constant -----------------------------

@dataclass
class ConjugationProbe:
    p: float
    degree: int
    ratio: float
    constant: float
    iterations: int
    u: TrigCoeffs

    @property
    def fraction(self) -> float:
        return self.ratio / self.constant


def conjugation_ratio(u: TrigCoeffs, p: float, grid: CircleGrid | None = None) -> float:
    """``||Hu||_p / ||u||_p`` evaluated on a grid that resolves ``|u|^p`` well."""
    if grid is None:
        grid = CircleGrid(next_pow2(max(DEFAULT_GRID, 16 * (u.band + 1))))
    num = lp_norm(conjugate_function(u).samples(grid), p)
    den = lp_norm(u.samples(grid), p)
    return num / den


def _power_seed(degree: int, exponent: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Cosine/sine coefficients of ``((1+z)/(1-z))^exponent`` on the circle, truncated.

    On the circle ``(1+z)/(1-z) = i cot(t/2)``, so the boundary values are
    ``|cot(t/2)|^exponent * exp(+-i pi exponent / 2)``.  Midpoint nodes avoid
    the two singular points.
    """
    t = 2 * np.pi * (np.arange(size) + 0.5) / size
    cot = 1.0 / np.tan(t / 2)
    mag = np.abs(cot) ** exponent
    re = mag * math.cos(math.pi * exponent / 2)
    im = np.sign(cot) * mag * math.sin(math.pi * exponent / 2)
    phase = np.exp(-1j * np.pi * np.arange(degree + 1) / size)
    spec_re = np.fft.rfft(re)[: degree + 1] * phase / size
    spec_im = np.fft.rfft(im)[: degree + 1] * phase / size
    # Re part is even (cosine series), Im part is odd (sine series)
    return 2 * spec_re.real[1:], -2 * spec_im.imag[1:]


def _ratio_objective(p: float, d: int, n: int):
    """Negative log-ratio and its gradient in packed real coordinates."""

    def unpack(x):
        c = np.zeros(n // 2 + 1, dtype=complex)
        c[0] = x[0]
        c[1: d + 1] = x[1: d + 1] + 1j * x[d + 1:]
        return c

    def objective(x):
        c = unpack(x)
        u = np.fft.irfft(c * n, n=n)
        cv = -1j * c
        cv[0] = 0.0
        v = np.fft.irfft(cv * n, n=n)
        au, av = np.abs(u), np.abs(v)
        nu = np.mean(au ** p)
        nv = np.mean(av ** p)
        val = (np.log(nv) - np.log(nu)) / p
        gu = au ** (p - 1) * np.sign(u) / (nu * n)
        gv = av ** (p - 1) * np.sign(v) / (nv * n)
        fu = np.fft.rfft(gu)[1: d + 1]
        fv = np.fft.rfft(gv)[1: d + 1]
        g_re = -2 * fu.real - 2 * fv.imag
        g_im = -2 * fu.imag + 2 * fv.real
        grad = np.concatenate([[-np.sum(gu)], g_re, g_im])
        return -val, -grad

    return objective, unpack


def _objective_grid(p: float, d: int) -> int:
    n = next_pow2(max(64, 8 * d * max(1, math.ceil(p)) // 2 + 2))
    return max(n, next_pow2(4 * d + 4))


def _seed_vector(p: float, d: int, exponent: float) -> np.ndarray:
    cos_part, sin_part = _power_seed(d, exponent, max(16 * d, 4096))
    if p > 2:
        # u = Im G, whose conjugate is 1 - Re G
        return np.concatenate([[0.0], np.zeros(d), sin_part])
    return np.concatenate([[1.0], cos_part, np.zeros(d)])


def _probe(p: float, d: int, x: np.ndarray, iterations: int, unpack) -> ConjugationProbe:
    c = unpack(x)[: d + 1]
    u = TrigCoeffs(np.concatenate([np.conj(c[:0:-1]), c]))
    return ConjugationProbe(p=p, degree=d, ratio=conjugation_ratio(u, p),
                            constant=pichorides_A(p), iterations=iterations, u=u)


def maximize_conjugation_ratio(p: float, degree: int, starts: int = 4,
                               seed: int = 0, maxiter: int = 3000) -> ConjugationProbe:
    """Maximize ``||Hu||_p / ||u||_p`` over real trigonometric polynomials of a given degree.

    L-BFGS on the log-ratio with an FFT gradient.  One start is the truncated
    sine series of ``Im((1+z)/(1-z))^beta`` with the exponent at the edge of
    ``L^p`` (a known near-extremal family, up to the constant term); the
    remaining starts are random.  The value returned is attained by the
    explicit polynomial in ``u``, so it is a genuine lower bound for the
    constrained supremum.
    """
    from scipy.optimize import minimize

    p = float(p)
    d = int(degree)
    objective, unpack = _ratio_objective(p, d, _objective_grid(p, d))

    rng = np.random.default_rng(seed)
    k = np.arange(1, d + 1)
    seeds = [_seed_vector(p, d, 1.0 / p)]
    for _ in range(max(0, starts - 1)):
        seeds.append(np.concatenate([rng.normal(size=1), rng.normal(size=d) / k, rng.normal(size=d) / k]))

    best = None
    for x0 in seeds:
        res = minimize(objective, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "gtol": 1e-13, "ftol": 1e-15, "maxcor": 30})
        if best is None or res.fun < best.fun:
            best = res
    return _probe(p, d, best.x, int(best.nit), unpack)


def sharpness_search(p: float, budget: float = 300.0, target: float = 0.9,
                     start_degree: int = 256, polish_iter: int = 200) -> ConjugationProbe:
    """Push ``||Hu||_p / ||u||_p`` towards ``A_p`` within a wall-clock budget (seconds).

    Degrees grow by factors of 4.  At each degree the exponent of the seed
    family is scanned around ``1/p`` (truncation shifts the optimum slightly
    above it), and the best seed is polished by a short L-BFGS run.  The
    search stops when ``target * A_p`` is reached or the next rung would not
    fit in the budget.  The ratio of the last polynomial is returned; it is a
    certified lower bound whether or not the target was reached.
    """
    from scipy.optimize import minimize

    p = float(p)
    t0 = time.perf_counter()
    best, d, last = None, int(start_degree), 0.0
    while True:
        t_rung = time.perf_counter()
        objective, unpack = _ratio_objective(p, d, _objective_grid(p, d))
        scan = []
        for g in np.linspace(0.9, 1.3, 9) / p:
            x = _seed_vector(p, d, g)
            scan.append((objective(x)[0], g, x))
        _, _, x0 = min(scan, key=lambda s: s[0])
        res = minimize(objective, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": polish_iter, "gtol": 1e-13, "ftol": 1e-15, "maxcor": 30})
        probe = _probe(p, d, res.x, int(res.nit), unpack)
        if best is None or probe.ratio > best.ratio:
            best = probe
        last = time.perf_counter() - t_rung
        spent = time.perf_counter() - t0
        if best.fraction >= target or spent + 5 * last > budget:
            return best
        d *= 4
