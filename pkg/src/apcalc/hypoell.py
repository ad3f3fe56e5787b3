"""Strength of polynomials and sampled hypoellipticity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .scalars import EXACT, FLOAT, ExactScalar, convert
from .symexpr import (GROWTH_TOL, SymbolExpr, XiPoly, log_slope, product_grid, top_decade)
from .trigpoly import TrigPoly, multi_factorial, multi_indices, quasi_period, uniform_grid

ZERO_RTOL = 1e-12


class PolySymbol:
    """Polynomial ``P(xi) = sum_alpha c_alpha xi^alpha`` with constant coefficients."""

    def __init__(self, coeffs: Mapping, d: int, mode: str = FLOAT):
        self.d = d
        self.mode = mode
        clean = {}
        for alpha, c in coeffs.items():
            alpha = tuple(int(a) for a in (alpha if isinstance(alpha, (tuple, list)) else (alpha,)))
            if len(alpha) != d:
                raise ValueError(f"multi-index {alpha} does not have length {d}")
            c = convert(c, mode)
            clean[alpha] = clean[alpha] + c if alpha in clean else c
        self.coeffs = {a: c for a, c in clean.items() if c != 0}

    @classmethod
    def from_json(cls, data: Mapping, mode: str | None = None) -> "PolySymbol":
        mode = mode or data.get("mode", FLOAT)
        mons = data["monomials"]
        d = int(data.get("dim", len(mons[0]["alpha"]) if mons else 1))
        coeffs: dict = {}
        for m in mons:
            if mode == EXACT:
                c = ExactScalar.from_number((Fraction(str(m.get("re", 0))), Fraction(str(m.get("im", 0)))))
            else:
                c = complex(m.get("re", 0.0), m.get("im", 0.0))
            a = tuple(m["alpha"])
            coeffs[a] = coeffs[a] + c if a in coeffs else c
        return cls(coeffs, d, mode)

    def to_json(self) -> dict:
        mons = []
        for a, c in sorted(self.coeffs.items()):
            z = complex(c)
            mons.append({"alpha": list(a), "re": z.real, "im": z.imag})
        return {"dim": self.d, "mode": self.mode, "monomials": mons}

    @classmethod
    def from_symbol(cls, a: SymbolExpr) -> "PolySymbol":
        if not (a.is_polynomial() and a.is_x_independent()):
            raise ValueError("symbol is not a constant-coefficient polynomial")
        return cls({al: c.mean_value() for al, c in a.as_poly().terms.items()}, a.d, a.mode)

    def to_symbol(self) -> SymbolExpr:
        from .symexpr import poly_symbol
        return poly_symbol(self.coeffs, self.d, mode=self.mode)

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def derivative(self, beta) -> "PolySymbol":
        out = {}
        for a, c in self.coeffs.items():
            if all(ai >= bi for ai, bi in zip(a, beta)):
                f = math.prod(math.factorial(ai) // math.factorial(ai - bi) for ai, bi in zip(a, beta))
                out[tuple(ai - bi for ai, bi in zip(a, beta))] = c * f
        return PolySymbol(out, self.d, self.mode)

    def conj(self) -> "PolySymbol":
        return PolySymbol({a: c.conjugate() for a, c in self.coeffs.items()}, self.d, self.mode)

    def __add__(self, other: "PolySymbol") -> "PolySymbol":
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out[a] + c if a in out else c
        return PolySymbol(out, self.d, _mode(self, other))

    def __mul__(self, other):
        if not isinstance(other, PolySymbol):
            return PolySymbol({a: c * other for a, c in self.coeffs.items()}, self.d, self.mode)
        out: dict = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                k = tuple(i + j for i, j in zip(a, b))
                out[k] = out[k] + ca * cb if k in out else ca * cb
        return PolySymbol(out, self.d, _mode(self, other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolySymbol):
            return NotImplemented
        return self.d == other.d and (self + other * -1).is_zero()

    __hash__ = None

    def __call__(self, xi):
        """Evaluate at one point (exactly for rational input in exact mode) or at rows of an array."""
        if isinstance(xi, (tuple, list)) and all(isinstance(v, (int, Fraction)) for v in xi):
            total = convert(0, self.mode)
            for a, c in self.coeffs.items():
                total = total + c * math.prod(Fraction(v) ** k for v, k in zip(xi, a))
            return total
        return self.eval(xi)

    def eval(self, xi) -> np.ndarray:
        X = np.asarray(xi, dtype=float).reshape(-1, self.d)
        out = np.zeros(X.shape[0], dtype=complex)
        for a, c in self.coeffs.items():
            out += complex(c) * np.prod(X ** np.array(a), axis=1)
        return out

    def __repr__(self):
        return f"PolySymbol({ {a: c for a, c in sorted(self.coeffs.items())} }, d={self.d})"


def _mode(p, q):
    return EXACT if p.mode == q.mode == EXACT else FLOAT


def strength_sq(P: PolySymbol) -> PolySymbol:
    """``sum_alpha |d^alpha P|^2`` as a real polynomial (for real xi)."""
    out = PolySymbol({}, P.d, P.mode)
    for alpha in multi_indices(P.d, P.degree):
        D = P.derivative(alpha)
        if not D.is_zero():
            out = out + D * D.conj()
    return out


def strength(P: PolySymbol, xi) -> np.ndarray:
    return np.sqrt(np.abs(strength_sq(P).eval(xi)))


# ---------------------------------------------------------------------------
# sampling


@dataclass
class HypoSampler:
    """Radii and directions for the sampled checks.

    Directions are the coordinate axes (both signs) and ``n_random``
    seeded unit vectors; in two dimensions an angular grid of
    ``angular`` points is added, and the worst direction at each radius is
    refined with a local optimiser.
    """

    radii: Sequence[float] | None = None
    n_random: int = 32
    seed: int = 0
    angular: int = 720
    refine: bool = True
    x_points: int = 16

    def directions(self, d: int) -> np.ndarray:
        dirs = [v for i in range(d) for v in (np.eye(d)[i], -np.eye(d)[i])]
        rng = np.random.default_rng(self.seed)
        for _ in range(self.n_random):
            v = rng.normal(size=d)
            dirs.append(v / np.linalg.norm(v))
        if d == 2 and self.angular:
            t = np.linspace(0, 2 * np.pi, self.angular, endpoint=False)
            dirs.extend(np.stack([np.cos(t), np.sin(t)], axis=1))
        return np.unique(np.round(np.array(dirs), 15), axis=0)

    def radius_grid(self, default=(0.0, 3.0, 31)) -> np.ndarray:
        if self.radii is not None:
            return np.asarray(self.radii, dtype=float)
        return np.logspace(*default)


def _sup_on_sphere(fn, r: float, dirs: np.ndarray, refine: bool) -> tuple[float, np.ndarray]:
    """Maximum of ``fn`` (vectorised over rows) on the sphere of radius ``r``."""
    vals = fn(r * dirs)
    j = int(np.nanargmax(vals))
    best, arg = float(vals[j]), dirs[j]
    if not refine or not np.isfinite(best):
        return best, r * arg
    d = dirs.shape[1]
    if d == 1:
        return best, r * arg
    if d == 2:
        th0 = math.atan2(arg[1], arg[0])
        step = 2 * math.pi / max(len(dirs), 8)
        res = minimize_scalar(lambda t: -fn(r * np.array([[math.cos(t), math.sin(t)]]))[0],
                              bounds=(th0 - step, th0 + step), method="bounded",
                              options={"xatol": 1e-10})
        if -res.fun > best:
            best, arg = float(-res.fun), np.array([math.cos(res.x), math.sin(res.x)])
        return best, r * arg

    def obj(v):
        n = np.linalg.norm(v)
        return -fn(r * (v / n)[None, :])[0] if n > 0 else 0.0

    res = minimize(obj, arg, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    if -res.fun > best:
        best, arg = float(-res.fun), res.x / np.linalg.norm(res.x)
    return best, r * arg


@dataclass
class HypoellReport:
    passed: bool
    rho_hat: float | None = None
    slopes: dict = field(default_factory=dict)
    r2: dict = field(default_factory=dict)
    A_used: float = 0.0
    witness: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    anisotropic: bool = False
    C_hat: float | None = None
    C1_hat: float | None = None
    passed_declared: bool | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pass": self.passed, "rho_hat": self.rho_hat,
            "slopes": {str(list(k)): v for k, v in self.slopes.items()},
            "r2": {str(list(k)): v for k, v in self.r2.items()},
            "A_used": self.A_used, "witness": self.witness, "excluded": self.excluded,
            "anisotropic": self.anisotropic, "C_hat": self.C_hat, "C1_hat": self.C1_hat,
            "pass_declared": self.passed_declared, "notes": self.notes,
        }


@dataclass(frozen=True)
class HypoellParams:
    """Constants of the formal s-hypoellipticity conditions."""

    m: float
    m0: float
    rho: float = 1.0
    s: float = 1.0
    A: float = 0.0
    B: float = 0.0
    C: float = 1.0
    C1: float = 1.0

    def __post_init__(self):
        if self.m0 > self.m:
            raise ValueError("need m0 <= m")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if self.s < 1 or self.s * self.rho < 1 - 1e-12:
            raise ValueError("need s >= 1 and s rho >= 1")
        if self.A < 0 or self.B < 0 or self.C <= 0 or self.C1 <= 0:
            raise ValueError("need A, B >= 0 and C, C1 > 0")


# ---------------------------------------------------------------------------


def weaker_check(Q: PolySymbol, P: PolySymbol, sampler: HypoSampler | None = None):
    """Is ``Q`` weaker than ``P``?  Returns ``(passed, C_hat, slope)``.

    ``C_hat`` is the largest sampled ratio of strengths; the verdict asks
    that the per-radius maximum shows no upward trend over the top decade.
    """
    if P.d != Q.d:
        raise ValueError("dimension mismatch")
    if P.is_zero():
        raise ValueError("P must be non-zero")
    sampler = sampler or HypoSampler(angular=0, refine=False)
    Qs, Ps = strength_sq(Q), strength_sq(P)
    dirs = sampler.directions(P.d)
    radii = sampler.radius_grid()

    def ratio(pts):
        return np.sqrt(np.abs(Qs.eval(pts)) / np.abs(Ps.eval(pts)))

    per = np.array([_sup_on_sphere(ratio, r, dirs, sampler.refine)[0] for r in radii])
    C_hat = float(per.max())
    sel = top_decade(radii)
    slope = log_slope(radii[sel], per[sel]) if per[sel].min() > 0 else 0.0
    return bool(slope <= GROWTH_TOL), C_hat, slope


def _default_A(P: PolySymbol, dirs: np.ndarray, radii: np.ndarray) -> tuple[float | None, list]:
    """Twice the smallest sampled radius where ``|P|`` is non-zero in every direction."""
    zeros = []
    for r in radii:
        vals = np.abs(P.eval(r * dirs))
        tol = ZERO_RTOL * max(vals.max(), 1e-300)
        bad = vals <= tol
        if bad.any():
            zeros.append((float(r), (r * dirs[int(np.argmax(bad))]).tolist()))
        else:
            return 2.0 * float(r), zeros
    return None, zeros


def s_hypoelliptic_fit(P: PolySymbol, directions: np.ndarray | None = None,
                       radii: Sequence[float] | None = None, A: float | None = None,
                       sampler: HypoSampler | None = None) -> HypoellReport:
    """Fit the decay exponent of ``|d^beta P| / |P|`` for every ``beta`` up to the degree.

    For each radius the ratio is maximised over the sphere, and the slope
    ``sigma_beta`` of its logarithm against ``log(1 + r)`` is fitted over
    radii ``>= A``.  ``rho_hat = min_beta (-sigma_beta / |beta|)`` clipped to
    ``(0, 1]``.
    """
    if P.degree == 0:
        raise ValueError("P must be non-constant")
    sampler = sampler or HypoSampler()
    d = P.d
    dirs = sampler.directions(d) if directions is None else np.asarray(directions, dtype=float).reshape(-1, d)
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    rgrid = np.asarray(radii, dtype=float) if radii is not None else sampler.radius_grid((1.0, 4.0, 31))

    probe = np.logspace(-2, math.log10(rgrid.max()), 60)
    A_auto, zeros = _default_A(P, dirs, probe)
    report = HypoellReport(False)
    if A is None:
        if A_auto is None:
            report.witness = [{"radius": r, "xi": pt, "reason": "P vanishes"} for r, pt in zeros[-3:]]
            report.notes.append("P has sampled zeros at every radius")
            return report
        A = A_auto
    report.A_used = float(A)
    use = rgrid[rgrid >= A]
    if use.size < 4:
        report.notes.append("fewer than four radii beyond A")
        return report

    Pabs = lambda pts: np.abs(P.eval(pts))
    # zeros beyond A
    for r in use:
        vals = Pabs(r * dirs)
        tol = ZERO_RTOL * vals.max()
        bad = np.nonzero(vals <= tol)[0]
        for j in bad[:3]:
            report.excluded.append({"radius": float(r), "xi": (r * dirs[j]).tolist()})
    if len({e["radius"] for e in report.excluded}) == use.size:
        report.notes.append("P vanishes at every sampled radius beyond A")
        report.witness = report.excluded[-3:]
        return report

    rhos = {}
    ok = True
    for beta in multi_indices(d, P.degree, 1):
        D = P.derivative(beta)
        if D.is_zero():
            continue

        def ratio(pts, D=D):
            num = np.abs(D.eval(pts))
            den = Pabs(pts)
            scale = den.max() if den.size > 1 else 1.0
            return np.where(den > ZERO_RTOL * max(scale, 1e-300), num / np.maximum(den, 1e-300), np.nan)

        sup = np.array([_sup_on_sphere(ratio, r, dirs, sampler.refine)[0] for r in use])
        good = np.isfinite(sup) & (sup > 0)
        if good.sum() < 4:
            ok = False
            continue
        lx, ly = np.log1p(use[good]), np.log(sup[good])
        sl, ic = np.polyfit(lx, ly, 1)
        resid = ly - (sl * lx + ic)
        ss = float(np.sum((ly - ly.mean()) ** 2))
        r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 1.0
        report.slopes[beta] = float(sl)
        report.r2[beta] = r2
        rhos[beta] = -float(sl) / sum(beta)
        if r2 < 0.98:
            ok = False
            report.witness.append({"beta": list(beta), "r2": r2})
    if not rhos:
        return report
    raw = min(rhos.values())
    report.rho_hat = float(min(max(raw, 0.0), 1.0))
    report.anisotropic = (max(rhos.values()) - raw) > 0.1
    report.passed = bool(ok and raw > 0)
    return report


def constant_strength_check(c: Sequence[TrigPoly], P: Sequence[PolySymbol],
                            sampler: HypoSampler | None = None, A: float = 1.0,
                            eps_tol: float = 1e-8) -> dict:
    """Lower bound ``|p(x, xi)| >= eps |P_0(xi)|`` for ``p = sum_j c_j(x) P_j(xi)``.

    Also checks that the top-degree coefficients of ``p`` never vanish
    simultaneously on the x-grid.
    """
    if len(c) != len(P) or not P:
        raise ValueError("need one coefficient per polynomial")
    sampler = sampler or HypoSampler(angular=0, refine=False)
    d = P[0].d
    xs = uniform_grid(quasi_period(list(c)), sampler.x_points)
    dirs = sampler.directions(d)
    radii = sampler.radius_grid()
    radii = radii[radii >= A]
    xis = (radii[:, None, None] * dirs[None]).reshape(-1, d)
    R = np.repeat(radii, dirs.shape[0])
    X, XI = product_grid(xs, xis)
    RR = np.tile(R, xs.shape[0])
    p = np.zeros(X.shape[0], dtype=complex)
    for cj, Pj in zip(c, P):
        p += cj.to_mode(FLOAT).evaluate(X) * Pj.eval(XI)
    p0 = np.abs(P[0].eval(XI))
    ok = p0 > 0
    ratio = np.where(ok, np.abs(p) / np.where(ok, p0, 1.0), np.inf)
    eps_hat = float(ratio.min())
    j = int(np.argmin(ratio))
    per = np.array([ratio[RR == r].min() for r in radii])
    sel = top_decade(radii)
    slope = log_slope(radii[sel], per[sel]) if per[sel].min() > 0 else -np.inf

    # leading coefficients a_alpha(x), |alpha| = m
    m = max(Pj.degree for Pj in P)
    lead = np.zeros(xs.shape[0])
    for alpha in multi_indices(d, m, m):
        a = np.zeros(xs.shape[0], dtype=complex)
        for cj, Pj in zip(c, P):
            if alpha in Pj.coeffs:
                a += complex(Pj.coeffs[alpha]) * cj.to_mode(FLOAT).evaluate(xs)
        lead += np.abs(a) ** 2
    lead_min = float(lead.min())
    scale = max(1.0, max(float(np.abs(cj.to_mode(FLOAT).coeff_vector()).sum()) for cj in c))
    passed = eps_hat > eps_tol and slope >= -GROWTH_TOL and lead_min > eps_tol * scale
    return {
        "pass": bool(passed), "eps_hat": eps_hat, "trend_slope": float(slope),
        "leading_min": lead_min, "A": A,
        "witness": None if passed else {"x": X[j].tolist(), "xi": XI[j].tolist(), "ratio": eps_hat},
    }


def aphs_check(a: SymbolExpr, hp: HypoellParams, max_order: int = 2,
               sampler: HypoSampler | None = None, x_period=None) -> HypoellReport:
    """Sample the lower bound and the derivative-over-symbol ratios of a symbol.

    Fits ``C1_hat = min |a| <xi>^-m0`` and the smallest ``C`` with
    ``|d_x^alpha d_xi^beta a / a| <= C^(|alpha|+|beta|) (alpha!)^(s rho) beta! <xi>^(-rho|beta|)``
    on the sample, for ``|xi| >= A``.  The verdict requires ``C1_hat > 0``
    and no trend (lower bound decaying or ratio growing over the top decade).
    """
    if a.nvars != 2:
        raise ValueError("aphs_check expects a symbol a(x, xi)")
    sampler = sampler or HypoSampler(angular=0, refine=False)
    d = a.d
    tps = a.trigpolys()
    period = np.broadcast_to(np.asarray(x_period, dtype=float), (d,)) if x_period is not None else \
        (quasi_period(tps)[:d] if tps else np.ones(d))
    xs = uniform_grid(period, sampler.x_points)
    dirs = sampler.directions(d)
    radii = sampler.radius_grid()
    radii = radii[radii >= max(hp.A, 1e-12)]
    xis = (radii[:, None, None] * dirs[None]).reshape(-1, d)
    R = np.tile(np.repeat(radii, dirs.shape[0]), xs.shape[0])
    X, XI = product_grid(xs, xis)
    br = np.sqrt(1 + np.sum(XI ** 2, axis=1))
    report = HypoellReport(False, A_used=float(hp.A))

    va = a.eval(X, XI)
    lower = np.abs(va) / br ** hp.m0
    report.C1_hat = float(lower.min())
    sel = top_decade(radii)
    per_lo = np.array([lower[R == r].min() for r in radii])
    lo_slope = log_slope(radii[sel], per_lo[sel]) if per_lo[sel].min() > 0 else -np.inf
    ok = report.C1_hat > ZERO_RTOL and lo_slope >= -GROWTH_TOL
    if not ok:
        j = int(np.argmin(lower))
        report.witness.append({"x": X[j].tolist(), "xi": XI[j].tolist(), "lower_ratio": float(lower[j])})
    C_hat = 0.0
    safe = np.where(np.abs(va) > 0, va, np.nan)
    for total in range(1, max_order + 1):
        for k in range(total + 1):
            for alpha in multi_indices(d, k, k):
                for beta in multi_indices(d, total - k, total - k):
                    D = a.d_multi(xi_alpha=beta, x_alpha=alpha)
                    if D.is_zero():
                        continue
                    q = np.abs(D.eval(X, XI) / safe)
                    w = multi_factorial(alpha) ** (hp.s * hp.rho) * multi_factorial(beta) * \
                        br ** (-hp.rho * sum(beta))
                    rr = q / w
                    C_hat = max(C_hat, float(np.nanmax(rr)) ** (1.0 / total))
                    per = np.array([np.nanmax(rr[R == r]) for r in radii])
                    sl = log_slope(radii[sel], per[sel])
                    report.slopes[(alpha, beta)] = sl
                    if sl > GROWTH_TOL:
                        ok = False
                        j = int(np.nanargmax(np.where(R == radii[-1], rr, np.nan)))
                        report.witness.append({"x": X[j].tolist(), "xi": XI[j].tolist(),
                                               "orders": [list(alpha), list(beta)], "slope": sl})
    report.C_hat = C_hat
    report.rho_hat = hp.rho
    report.passed = bool(ok)
    report.passed_declared = bool(ok and report.C1_hat >= hp.C1 and C_hat <= hp.C)
    return report
