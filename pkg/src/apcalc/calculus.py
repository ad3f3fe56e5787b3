"""Asymptotic expansions: symbol products, reductions, parametrices, cut-off sums."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hypoell import HypoellParams
from .scalars import EXACT, convert, two_pi_i
from .symexpr import (GROWTH_TOL, ClassParams, DomainError, Sampler, SymbolExpr, const,
                      log_slope, product_grid, top_decade, verify_class)
from .trigpoly import multi_factorial, multi_indices

MAX_PARAMETRIX_ORDER = 5


@dataclass
class FormalSum:
    """Finite truncation ``a_0, a_1, ...`` of a formal sum, with its class constants."""

    terms: list
    params: ClassParams | None = None
    A: float = 0.0
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.terms = list(self.terms)
        if not self.terms:
            raise ValueError("a formal sum needs at least one term")
        if self.params is not None and self.params.delta != 0:
            raise ValueError("calculus operations require delta = 0")

    @classmethod
    def of(cls, a) -> "FormalSum":
        return a if isinstance(a, FormalSum) else cls([a])

    @property
    def order_drop(self) -> float:
        return self.params.rho - self.params.delta if self.params else 1.0

    @property
    def d(self) -> int:
        return self.terms[0].d

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, j):
        return self.term(j) if isinstance(j, int) else self.terms[j]

    def term(self, j: int) -> SymbolExpr:
        if j < len(self.terms):
            return self.terms[j]
        t = self.terms[0]
        return SymbolExpr({}, t.d, t.nvars, t.basis)

    def partial(self, n: int) -> SymbolExpr:
        """``sum_{j < n} a_j``."""
        out = self.term(0) * 0
        for j in range(min(n, len(self.terms))):
            out = out + self.terms[j]
        return out

    def verify_terms(self, max_order: int = 2, sampler: Sampler | None = None) -> list:
        """verify_class on each term with the shifted order ``m - (rho - delta) j``."""
        if self.params is None:
            raise ValueError("no class parameters attached")
        return [verify_class(t, self.params.shifted(-self.order_drop * j), max_order, sampler)
                for j, t in enumerate(self.terms)]


def _factor(alpha, sign: int, mode: str):
    """``(alpha!)^-1 (sign 2 pi i)^-|alpha|``."""
    k = sum(alpha)
    tpi = two_pi_i(mode) * sign
    return convert(1, mode) / (convert(multi_factorial(alpha), mode) * tpi ** k)


def _mode(*exprs) -> str:
    return EXACT if all(e.mode == EXACT for e in exprs) else "float"


def symbol_product_term(A, B, j: int) -> SymbolExpr:
    """``c_j = sum_{|alpha| + k + l = j} (alpha!)^-1 (2 pi i)^-|alpha| d_xi^alpha a_k d_x^alpha b_l``."""
    A, B = FormalSum.of(A), FormalSum.of(B)
    d = A.d
    mode = _mode(*A.terms, *B.terms)
    out = A.term(0) * 0
    for n in range(j + 1):
        for alpha in multi_indices(d, n, n):
            fac = _factor(alpha, 1, mode)
            for k in range(j - n + 1):
                l = j - n - k
                ak, bl = A.term(k), B.term(l)
                if ak.is_zero() or bl.is_zero():
                    continue
                da = ak.d_multi(xi_alpha=alpha)
                if da.is_zero():
                    continue
                db = bl.d_multi(x_alpha=alpha)
                if db.is_zero():
                    continue
                out = out + (da * db).scale(fac)
    return out


def symbol_product(A, B, N: int) -> FormalSum:
    A_, B_ = FormalSum.of(A), FormalSum.of(B)
    return FormalSum([symbol_product_term(A_, B_, j) for j in range(N + 1)])


def amplitude_reduce(a: SymbolExpr, j: int) -> SymbolExpr:
    """``(2 pi i)^-j sum_{|alpha| = j} (alpha!)^-1 d_y^alpha d_xi^alpha a |_{y = x}``."""
    if a.nvars != 3:
        raise ValueError("amplitude_reduce expects an amplitude")
    mode = _mode(a)
    out = None
    for alpha in multi_indices(a.d, j, j):
        t = a.d_multi(xi_alpha=alpha, y_alpha=alpha)
        if t.is_zero():
            continue
        t = t.diagonal().scale(_factor(alpha, 1, mode))
        out = t if out is None else out + t
    return out if out is not None else const(0, a.d, 2, mode, a.basis)


def transpose_expansion(b: SymbolExpr, j: int) -> SymbolExpr:
    """``(-2 pi i)^-j sum_{|alpha| = j} (alpha!)^-1 (d_xi^alpha d_x^alpha b)(x, -xi)``."""
    if b.nvars != 2:
        raise ValueError("transpose_expansion expects a symbol")
    mode = _mode(b)
    out = b * 0
    for alpha in multi_indices(b.d, j, j):
        t = b.d_multi(xi_alpha=alpha, x_alpha=alpha)
        if not t.is_zero():
            out = out + t.neg_xi().scale(_factor(alpha, -1, mode))
    return out


def transpose_symbol(b: SymbolExpr, N: int) -> SymbolExpr:
    """``sum_{j <= N}`` of the transpose expansion (exact for differential operators of order <= N)."""
    out = b * 0
    for j in range(N + 1):
        out = out + transpose_expansion(b, j)
    return out


# ---------------------------------------------------------------------------
# parametrix


def parametrix(a: SymbolExpr, hypo: HypoellParams | None = None, N: int = 2,
               verify: bool = False, sampler: Sampler | None = None) -> FormalSum:
    """Left parametrix terms ``b_0 .. b_N`` with ``sum_j (b o a)_j = 1`` up to order ``N``.

    ``b_0 = 1/a`` and
    ``b_n = -(1/a) sum_{k<n} sum_{|alpha| = n-k} (alpha!)^-1 (2 pi i)^-|alpha| d_xi^alpha b_k d_x^alpha a``.
    """
    if a.nvars != 2:
        raise ValueError("parametrix expects a symbol")
    if a.is_zero():
        raise ValueError("cannot invert the zero symbol")
    if not 0 <= N <= MAX_PARAMETRIX_ORDER:
        raise ValueError(f"parametrix order must lie in 0..{MAX_PARAMETRIX_ORDER}")
    mode = _mode(a)
    inv = 1 / a
    terms = [inv]
    dx_a = {}
    for n in range(1, N + 1):
        acc = a * 0
        for k in range(n):
            for alpha in multi_indices(a.d, n - k, n - k):
                if alpha not in dx_a:
                    dx_a[alpha] = a.d_multi(x_alpha=alpha)
                if dx_a[alpha].is_zero():
                    continue
                db = terms[k].d_multi(xi_alpha=alpha)
                if db.is_zero():
                    continue
                acc = acc + (db * dx_a[alpha]).scale(_factor(alpha, 1, mode))
        terms.append(-(acc * inv))
    params = None
    if hypo is not None:
        params = ClassParams(m=-hypo.m0, rho=hypo.rho, s=max(hypo.s, 1.0 / hypo.rho), M=a.d // 2 + 1)
    out = FormalSum(terms, params, A=hypo.A if hypo else 0.0)
    if verify and params is not None:
        for j, rep in enumerate(out.verify_terms(max_order=2, sampler=sampler)):
            if not rep.passed_fitted:
                msg = f"parametrix term {j} shows growth beyond its class order"
                out.warnings.append(msg)
                warnings.warn(msg)
    return out


def parametrix_residual(a: SymbolExpr, b: FormalSum) -> SymbolExpr:
    """``r_N = sum_{|alpha| <= N} (alpha!)^-1 (2 pi i)^-|alpha| d_xi^alpha b_(N) d_x^alpha a - 1``.

    ``b_(N) = b_0 + ... + b_N``.  The terms with ``k + |alpha| <= N`` cancel
    against 1 by construction, so only the remaining ones are summed; this
    avoids subtracting nearly equal numbers when sampling.
    """
    N = len(b) - 1
    mode = _mode(a)
    out = a * 0
    for k in range(N + 1):
        for n in range(N - k + 1, N + 1):
            for alpha in multi_indices(a.d, n, n):
                dxa = a.d_multi(x_alpha=alpha)
                if dxa.is_zero():
                    continue
                db = b[k].d_multi(xi_alpha=alpha)
                if db.is_zero():
                    continue
                out = out + (db * dxa).scale(_factor(alpha, 1, mode))
    return out


def parametrix_residual_full(a: SymbolExpr, b: FormalSum) -> SymbolExpr:
    """Same quantity computed literally (sum of all terms minus 1); used as a cross-check."""
    N = len(b) - 1
    mode = _mode(a)
    bN = b.partial(N + 1)
    out = a * 0 - 1
    for n in range(N + 1):
        for alpha in multi_indices(a.d, n, n):
            out = out + (bN.d_multi(xi_alpha=alpha) * a.d_multi(x_alpha=alpha)).scale(_factor(alpha, 1, mode))
    return out


@dataclass
class ResidualFit:
    N: int
    slope: float
    radii: np.ndarray
    sup_values: np.ndarray

    def to_json(self) -> dict:
        return {"N": self.N, "slope": self.slope, "radii": self.radii.tolist(),
                "sup_abs_residual": self.sup_values.tolist()}


def residual_decay(a: SymbolExpr, N: int, radii: Sequence[float] | None = None,
                   x_points: int = 32, hypo: HypoellParams | None = None) -> ResidualFit:
    """Log-log slope of ``sup_x |r_N(x, xi)|`` against ``<xi>`` over sampled radii."""
    radii = np.asarray(radii if radii is not None else np.logspace(1, 3, 21), dtype=float)
    b = parametrix(a, hypo, N)
    r = parametrix_residual(a, b)
    sampler = Sampler(radii=radii, n_random=0, x_points=x_points)
    xs = sampler.x_points_for(a, a.d)
    dirs = sampler.directions(a.d)
    sup = np.zeros(radii.size)
    for i, rad in enumerate(radii):
        X, XI = product_grid(xs, rad * dirs)
        sup[i] = float(np.max(np.abs(r.eval(X, XI)))) if not r.is_zero() else 0.0
    slope = log_slope(np.sqrt(1 + radii ** 2), sup) if sup.min() > 0 else -math.inf
    return ResidualFit(N, slope, radii, sup)


# ---------------------------------------------------------------------------
# equivalence


@dataclass
class EquivalenceReport:
    passed: bool
    C_of_N: list
    slopes: dict
    witness: dict | None

    def to_json(self) -> dict:
        return {"pass": self.passed, "C_of_N": self.C_of_N,
                "slope": max(self.slopes.values(), default=0.0),
                "slopes": {str(k): v for k, v in self.slopes.items()}, "witness": self.witness}


def equivalence_check(A: FormalSum, B: FormalSum, N: int, sampler: Sampler | None = None,
                      params: ClassParams | None = None, max_order: int = 2) -> EquivalenceReport:
    """Fit ``C(N')`` for the partial differences ``sum_{j<N'} (a_j - b_j)``, ``N' = 1..N``.

    The weight is ``(N'! alpha!)^(s(rho-delta)) beta! <xi>^(m - rho|beta| + delta|alpha| - (rho-delta)N')``
    with ``alpha`` acting on x and ``beta`` on xi, sampled where
    ``<xi> >= B (N' + |beta|)^s``.  ``C(N')`` is the smallest constant making
    every sampled ratio at most 1; PASS means no tested order shows a ratio
    growing with ``<xi>`` (top-decade slope at most 0.05), in which case a
    finite constant absorbs the difference on the sample.
    """
    params = params or A.params or B.params
    if params is None:
        raise ValueError("class parameters required")
    sampler = sampler or Sampler()
    d = A.d
    sr = params.s * (params.rho - params.delta)
    tps = [tp for t in A.terms + B.terms for tp in t.trigpolys()]
    xs = sampler.x_points_for(tps, d)
    xis, rad = sampler.xi_points(d)
    X, XI = product_grid(xs, xis)
    R = np.tile(rad, xs.shape[0])
    br = np.sqrt(1 + np.sum(XI ** 2, axis=1))
    C_of_N, slopes = [], {}
    witness = None
    passed = True
    for Np in range(1, N + 1):
        D = A.partial(Np) - B.partial(Np)
        if D.is_zero():
            C_of_N.append(0.0)
            continue
        C = 0.0
        for total in range(max_order + 1):
            for k in range(total + 1):
                for alpha in multi_indices(d, k, k):
                    for beta in multi_indices(d, total - k, total - k):
                        deriv = D.d_multi(xi_alpha=beta, x_alpha=alpha)
                        if deriv.is_zero():
                            continue
                        la, lb = sum(alpha), sum(beta)
                        use = br >= params.B * (Np + lb) ** params.s
                        if not use.any():
                            continue
                        expo = params.m - params.rho * lb + params.delta * la - (params.rho - params.delta) * Np
                        w = (math.factorial(Np) * multi_factorial(alpha)) ** sr * multi_factorial(beta) * br ** expo
                        ratio = np.where(use, np.abs(deriv.eval(X, XI)) / w, 0.0)
                        power = 1 + la + lb + Np
                        C = max(C, float(ratio.max()) ** (1.0 / power))
                        radii = np.unique(R[use])
                        if radii.size >= 3:
                            per = np.array([ratio[use & (R == r)].max() for r in radii])
                            sel = top_decade(radii)
                            sl = log_slope(np.sqrt(1 + radii[sel] ** 2), per[sel])
                            slopes[(Np, alpha, beta)] = sl
                            if sl > GROWTH_TOL:
                                passed = False
                                if witness is None:
                                    j = int(np.argmax(np.where(R == radii[-1], ratio, -1)))
                                    witness = {"N": Np, "x": X[j].tolist(), "xi": XI[j].tolist(),
                                               "orders": [list(alpha), list(beta)], "slope": sl}
        C_of_N.append(C)
    return EquivalenceReport(passed, C_of_N, slopes, witness)


# ---------------------------------------------------------------------------
# cut-off summation


def _G(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """``G(t) / (G(t) + G(1 - t))`` with ``G(t) = exp(-1/t)`` for ``t > 0``."""
    g0, g1 = _G(t), _G(1.0 - np.asarray(t, dtype=float))
    return g0 / (g0 + g1)


@dataclass(frozen=True)
class CutoffFamily:
    """``phi_j(xi) = h((|xi| - 2 L_j) / L_j)`` with ``L_j = R (j+1)^s``.

    ``K`` bounds the derivative orders ``|gamma| <= K (j+1)`` covered by the
    derivative estimate.
    """

    R: float = 4.0
    s: float = 1.0
    K: int = 3

    def __post_init__(self):
        if self.R <= 0 or self.s < 1 or self.K < 1:
            raise ValueError("need R > 0, s >= 1, K >= 1")

    def scale(self, j: int) -> float:
        return self.R * (j + 1) ** self.s

    def __call__(self, j: int, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        r = np.abs(xi) if xi.ndim <= 1 and xi.size == 1 else np.linalg.norm(np.atleast_2d(xi), axis=-1)
        L = self.scale(j)
        return smooth_step((r - 2 * L) / L)

    def radial_derivative(self, j: int, r, order: int, h: float | None = None) -> np.ndarray:
        """Derivative of the radial profile by central differences (orders up to 3)."""
        L = self.scale(j)
        h = h or 1e-3 * L
        r = np.asarray(r, dtype=float)
        f = lambda z: smooth_step((z - 2 * L) / L)
        stencils = {0: ([0], [1.0]),
                    1: ([-1, 1], [-0.5, 0.5]),
                    2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
                    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5])}
        if order not in stencils:
            raise ValueError("orders up to 3 are supported")
        off, wts = stencils[order]
        return sum(w * f(r + o * h) for o, w in zip(off, wts)) / h ** order

    def derivative_constant(self, j: int, order: int, n: int = 4001) -> float:
        """``sup |phi_j^(order)| (R (j+1)^(s-1))^order`` on the transition zone."""
        L = self.scale(j)
        r = np.linspace(2 * L, 3 * L, n)
        return float(np.max(np.abs(self.radial_derivative(j, r, order)))) * \
            (self.R * (j + 1) ** (self.s - 1)) ** order


class CutoffSum:
    """Evaluable ``(x, xi) -> sum_{j <= N} phi_j(xi) a_j(x, xi)``."""

    def __init__(self, F: FormalSum, cutoffs: CutoffFamily, N_trunc: int):
        self.F = F
        self.cutoffs = cutoffs
        self.N = min(N_trunc, len(F) - 1)

    def eval(self, x, xi) -> np.ndarray | complex:
        d = self.F.d
        X = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1, d)
        XI = np.atleast_1d(np.asarray(xi, dtype=float)).reshape(-1, d)
        n = max(X.shape[0], XI.shape[0])
        X, XI = np.broadcast_to(X, (n, d)), np.broadcast_to(XI, (n, d))
        r = np.linalg.norm(XI, axis=1)
        out = np.zeros(n, dtype=complex)
        for j in range(self.N + 1):
            phi = self.cutoffs(j, XI)
            live = phi > 0
            if not live.any():
                continue
            vals = np.zeros(n, dtype=complex)
            vals[live] = self.F.terms[j].eval(X[live], XI[live])
            out += phi * vals
        scalar = np.ndim(xi) <= (0 if d == 1 else 1) and np.ndim(x) <= (0 if d == 1 else 1)
        return complex(out[0]) if scalar else out

    __call__ = eval


def sum_formal(F: FormalSum, cutoffs: CutoffFamily | None = None, N_trunc: int | None = None) -> CutoffSum:
    """Cut-off realisation of a formal sum (only finitely many terms are live at each xi)."""
    return CutoffSum(F, cutoffs or CutoffFamily(), len(F) - 1 if N_trunc is None else N_trunc)
