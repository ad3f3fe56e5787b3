"""A compactly supported Gevrey bump and the failure of a global Gevrey constant.

``g_s(x) = exp(-x^(-1/(s-1)))`` for ``x > 0`` (zero otherwise) and
``psi(x) = g_s(x) g_s(1 - x)``.  Derivatives of ``g_s`` are kept as exact
finite sums ``sum_k c_k x^(q_k) g_s(x)`` with rational ``c_k, q_k``; they are
evaluated in the log domain, which keeps the flat region near 0 free of
underflow and overflow.

The almost periodic function built from dilated, periodised copies of
``psi`` is never materialised: its blocks have disjoint supports, so every
derivative bound reduces to one dilated bump ``psi_n(x) = psi(n x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import kernels

MAX_ORDER = 40
GRID_POINTS = 2049
REFINE_POINTS = 257


def _as_fraction(s) -> Fraction:
    s = Fraction(str(s)) if not isinstance(s, Fraction) else s
    if s <= 1:
        raise ValueError("s must exceed 1")
    return s


@dataclass(frozen=True)
class GsTerm:
    """``sum_q c_q x^q exp(-x^(-a))`` with exact rational ``c_q`` and ``q``."""

    a: Fraction
    coeffs: tuple  # ((q, c), ...), sorted by q

    @classmethod
    def base(cls, s) -> "GsTerm":
        s = _as_fraction(s)
        return cls(1 / (s - 1), ((Fraction(0), Fraction(1)),))

    def derivative(self) -> "GsTerm":
        out: dict = {}
        a = self.a
        for q, c in self.coeffs:
            # d/dx x^q e^{-x^-a} = q x^(q-1) e + a x^(q-a-1) e
            for qq, cc in ((q - 1, c * q), (q - a - 1, c * a)):
                if cc:
                    out[qq] = out.get(qq, 0) + cc
        return GsTerm(a, tuple(sorted((q, c) for q, c in out.items() if c)))

    def __len__(self):
        return len(self.coeffs)

    def arrays(self):
        signs = np.array([1.0 if c > 0 else -1.0 for _, c in self.coeffs])
        logc = np.array([_log_abs(c) for _, c in self.coeffs])
        powers = np.array([float(q) for q, _ in self.coeffs])
        return signs, logc, powers

    def __call__(self, x) -> np.ndarray:
        signs, logc, powers = self._cached_arrays()
        return kernels.gs_eval(signs, logc, powers, float(self.a), np.asarray(x, dtype=float))

    def _cached_arrays(self):
        return _arrays(self)

    def to_string(self) -> str:
        parts = [f"({c})*x^({q})" for q, c in self.coeffs]
        return "[" + " + ".join(parts) + f"] * exp(-x^(-{self.a}))"


@lru_cache(maxsize=None)
def _arrays(term: GsTerm):
    return term.arrays()


def _log_abs(c: Fraction) -> float:
    c = abs(c)
    return math.log(c.numerator) - math.log(c.denominator)


@lru_cache(maxsize=None)
def _gs_chain(s: Fraction, j: int) -> GsTerm:
    if j == 0:
        return GsTerm.base(s)
    return _gs_chain(s, j - 1).derivative()


def gs_derivative(s, j: int) -> GsTerm:
    """Exact ``j``-th derivative of ``g_s``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if j > MAX_ORDER:
        raise ValueError(f"order {j} exceeds the term-count guard {MAX_ORDER}; use a lower j")
    return _gs_chain(_as_fraction(s), j)


def psi(s, x) -> np.ndarray:
    return psi_derivative(s, 0, x)


def psi_derivative(s, j: int, x) -> np.ndarray:
    """``d^j psi`` by the Leibniz rule applied to ``g_s(x) g_s(1 - x)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    if not inside.any():
        return out
    xi = x[inside]
    left = [gs_derivative(s, i)(xi) for i in range(j + 1)]
    right = [gs_derivative(s, i)(1.0 - xi) for i in range(j + 1)]
    acc = np.zeros_like(xi)
    for i in range(j + 1):
        acc += math.comb(j, i) * (-1) ** (j - i) * left[i] * right[j - i]
    out[inside] = acc
    return out


def chebyshev_grid(n: int = GRID_POINTS, a: float = 0.0, b: float = 1.0) -> np.ndarray:
    k = np.arange(n)
    return a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * k / (n - 1)))


@dataclass
class SupResult:
    value: float
    argmax: float


def psi_derivative_sup(s, j: int, grid: np.ndarray | int = GRID_POINTS, refine: bool = True) -> SupResult:
    """Sampled ``sup |d^j psi|`` on ``[0, 1]``, refined once around the best node."""
    if j > MAX_ORDER:
        raise ValueError(f"order {j} exceeds {MAX_ORDER}")
    xs = chebyshev_grid(grid) if isinstance(grid, (int, np.integer)) else np.asarray(grid, dtype=float)
    vals = np.abs(psi_derivative(s, j, xs))
    k = int(np.argmax(vals))
    best, arg = float(vals[k]), float(xs[k])
    if refine:
        lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
        fine = np.linspace(lo, hi, REFINE_POINTS)
        fv = np.abs(psi_derivative(s, j, fine))
        kk = int(np.argmax(fv))
        if fv[kk] > best:
            best, arg = float(fv[kk]), float(fine[kk])
    return SupResult(best, arg)


@dataclass
class C0Estimate:
    C0_lb: float
    j_star: int
    roots: list
    sups: list

    def to_json(self) -> dict:
        return {"C0_lb": self.C0_lb, "j_star": self.j_star, "roots": self.roots, "sups": self.sups,
                "note": "lower bound for C0 (finite j range and sampled sup)"}


@lru_cache(maxsize=64)
def _sup_table(s: Fraction, j_max: int, grid: int) -> tuple:
    return tuple(psi_derivative_sup(s, j, grid).value for j in range(j_max + 1))


def C0_estimate(s, j_max: int = 20, grid: int = GRID_POINTS) -> C0Estimate:
    """``max_{1 <= j <= j_max} (sup|d^j psi| / (j!)^s)^(1/j)``, a lower bound for C0."""
    if not 1 <= j_max <= MAX_ORDER:
        raise ValueError(f"j_max must lie in 1..{MAX_ORDER}")
    sf = _as_fraction(s)
    sups = _sup_table(sf, j_max, grid)
    roots = [math.exp((math.log(sups[j]) - float(sf) * math.lgamma(j + 1)) / j) if sups[j] > 0 else 0.0
             for j in range(1, j_max + 1)]
    k = int(np.argmax(roots))
    return C0Estimate(float(roots[k]), k + 1, roots, list(sups))


@dataclass
class Witness:
    n: int
    C: float
    M_n: float
    j_arg: int
    hypothesis_holds: bool
    values: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"n": self.n, "C": self.C, "M_n": self.M_n, "j_arg": self.j_arg,
                "n_quarter": self.n ** 0.25, "exceeds_n_quarter": self.M_n > self.n ** 0.25,
                "regime": "n > (C/C0_lb)^2" if self.hypothesis_holds else "boundary: n <= (C/C0_lb)^2"}


def growth_witness(s, C: float, n: int, j_max: int = 20, grid: int = GRID_POINTS,
                   C0_lb: float | None = None) -> Witness:
    """``M_n = max_{1 <= j <= j_max, 0 <= x <= 1/n} n^(-1/4) C^-j (j!)^-s |d^j psi_n(x)|``.

    Uses ``d^j psi_n(x) = n^j (d^j psi)(n x)``; the sup over ``[0, 1/n]`` is the
    sup of ``d^j psi`` over ``[0, 1]``.  Computed in logs.
    """
    if not 1 <= n <= 30:
        raise ValueError("n must lie in 1..30")
    sf = _as_fraction(s)
    sups = _sup_table(sf, j_max, grid)
    logs = []
    for j in range(1, j_max + 1):
        if sups[j] <= 0:
            logs.append(-math.inf)
            continue
        logs.append(-0.25 * math.log(n) + j * math.log(n) - j * math.log(C)
                    - float(sf) * math.lgamma(j + 1) + math.log(sups[j]))
    k = int(np.argmax(logs))
    c0 = C0_lb if C0_lb is not None else C0_estimate(sf, j_max, grid).C0_lb
    return Witness(n, float(C), math.exp(logs[k]), k + 1, n > (C / c0) ** 2, logs)


def growth_slope(s, C: float, n_list=(4, 8, 16), j_max: int = 20, grid: int = GRID_POINTS) -> tuple:
    """Witnesses for each ``n`` and the least-squares slope of ``log M_n`` against ``log n``."""
    ws = [growth_witness(s, C, n, j_max, grid) for n in n_list]
    x = np.log(np.array(n_list, dtype=float))
    y = np.log(np.array([w.M_n for w in ws]))
    slope = float(np.polyfit(x, y, 1)[0]) if len(ws) > 1 else math.nan
    return ws, slope


# ---------------------------------------------------------------------------
# partial sums of the almost periodic function


def psi_integral(s) -> float:
    val, _ = quad(lambda t: float(psi(s, np.array([t]))[0]), 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def partial_sum(s, N: int):
    """Callable ``f_N = sum_{n <= N} n^(-1/4) phi_n``, ``phi_n`` the ``2^(n+1)``-periodic copies of ``psi_n``."""

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for n in range(1, N + 1):
            period = 2.0 ** (n + 1)
            local = np.mod(x - 2.0 ** n, period)
            out += n ** -0.25 * psi(s, n * local)
        return out

    return f


def partial_sum_mean(s, N: int) -> float:
    """Exact mean of ``f_N``: each block contributes ``n^(-1/4) (int psi) / (n 2^(n+1))``."""
    I = psi_integral(s)
    return sum(n ** -0.25 * I / (n * 2.0 ** (n + 1)) for n in range(1, N + 1))
