"""Action of symbols and amplitudes on trigonometric polynomials.

On a trigonometric polynomial the Kohn-Nirenberg quantisation reduces to a
finite sum, ``a(x, D) e_eta = a(x, eta) e_eta``, so every operation here is
exact whenever ``a(., eta)`` is itself a trigonometric polynomial.  When it
is not (quotients with x-dependent denominators) the output keeps the
symbolic coefficient and can be sampled or coefficient-extracted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .scalars import EXACT, FLOAT, convert
from .symexpr import DomainError, NotCollapsible, SymbolExpr
from .trigpoly import (RATIONAL, Basis, DimensionError, ExactModeError, NormParams,
                       TrigPoly, freq_add, norm)


@dataclass(frozen=True)
class APTerm:
    """One output term ``coeff(x) e_freq(x)``.

    Either ``coeff`` is a trigonometric polynomial, or the coefficient is
    ``fhat * symbol(x, xi_value)`` and is kept symbolic.
    """

    freq: tuple
    coeff: TrigPoly | None = None
    symbol: SymbolExpr | None = None
    xi_value: tuple | None = None
    fhat: complex = 1.0

    @property
    def collapsible(self) -> bool:
        return self.coeff is not None


class APFunction:
    """Finite sum of almost periodic coefficient functions times exponentials."""

    def __init__(self, terms: Sequence[APTerm], dim: int, basis: Basis = RATIONAL, mode: str = FLOAT):
        self.terms = sorted(terms, key=lambda t: t.freq)
        self.dim = dim
        self.basis = basis
        self.mode = mode

    @classmethod
    def from_trigpoly(cls, f: TrigPoly) -> "APFunction":
        zero = (Fraction(0),) * (f.dim * f.basis.size)
        return cls([APTerm(zero, coeff=f)], f.dim, f.basis, f.mode)

    @property
    def collapsible(self) -> bool:
        return all(t.collapsible for t in self.terms)

    def __add__(self, other: "APFunction") -> "APFunction":
        if other.dim != self.dim:
            raise DimensionError("dimension mismatch")
        mode = EXACT if self.mode == other.mode == EXACT else FLOAT
        return APFunction(self.terms + other.terms, self.dim, self.basis, mode)

    def collapse(self) -> TrigPoly:
        """The trigonometric polynomial with the same values."""
        if not self.collapsible:
            raise NotCollapsible("output has non-polynomial coefficients; "
                                 "compare sampled values or use coefficients()")
        out = TrigPoly.zero(self.dim, self.basis, self.mode)
        for t in self.terms:
            c = t.coeff if t.coeff.mode == self.mode else t.coeff.to_mode(self.mode)
            out = out + c.shift(t.freq)
        return out

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        bvals = self.basis.values
        for t in self.terms:
            if t.collapsible:
                out += t.coeff.shift(t.freq).evaluate(pts)
                continue
            xi = np.array(t.xi_value, dtype=float)
            eta = _freq_numeric(t.freq, self.dim, bvals)
            out += complex(t.fhat) * t.symbol.eval(pts, xi) * np.exp(2j * math.pi * (pts @ eta))
        return out

    __call__ = evaluate

    def coefficients(self, points_per_axis: int = 64) -> TrigPoly:
        """Bohr-Fourier coefficients: exact when collapsible, else by periodic sampling.

        The sampled route needs rational frequencies; the function is
        sampled over one common period and transformed with the FFT, so
        frequencies above ``points_per_axis / (2 * period)`` alias.
        """
        if self.collapsible:
            return self.collapse()
        if not self.basis.is_rational:
            raise NotCollapsible("sampled coefficient extraction needs rational frequencies")
        period = self._period()
        axes = [np.arange(points_per_axis) * (L / points_per_axis) for L in period]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = self.evaluate(pts).reshape((points_per_axis,) * self.dim)
        spectrum = np.fft.fftn(vals) / vals.size
        terms = {}
        for idx in np.ndindex(*spectrum.shape):
            c = spectrum[idx]
            if abs(c) < 1e-14 * max(1.0, float(np.abs(spectrum).max())):
                continue
            k = [i if i < points_per_axis // 2 else i - points_per_axis for i in idx]
            xi = tuple(Fraction(k[a]) / Fraction(period[a]).limit_denominator(10 ** 6) for a in range(self.dim))
            terms[xi] = complex(c)
        return TrigPoly(terms, self.dim, self.basis, FLOAT)

    def _period(self) -> np.ndarray:
        dens = [[1] for _ in range(self.dim)]
        for t in self.terms:
            for a in range(self.dim):
                dens[a].append(t.freq[a].denominator)
            tps = t.symbol.trigpolys() if t.symbol is not None else [t.coeff]
            for tp in tps:
                for xi in tp.frequencies:
                    for a in range(self.dim):
                        dens[a].append(xi[a].denominator)
        return np.array([float(math.lcm(*d)) for d in dens])

    def to_json(self) -> dict:
        if self.collapsible:
            return {"kind": "trigpoly", "trigpoly": self.collapse().to_json()}
        terms = []
        for t in self.terms:
            entry = {"freq": [[str(v.numerator), str(v.denominator)] for v in t.freq]}
            if t.collapsible:
                entry["coeff"] = t.coeff.to_json()
            else:
                z = complex(t.fhat)
                entry.update(symbol=t.symbol.to_json(), xi=list(map(float, t.xi_value)),
                             fhat={"re": z.real, "im": z.imag})
            terms.append(entry)
        return {"kind": "apfunction", "dim": self.dim, "basis": list(self.basis.names), "terms": terms}


def _freq_numeric(freq: tuple, dim: int, bvals: np.ndarray) -> np.ndarray:
    nb = len(bvals)
    return np.array([float(sum(float(freq[a * nb + k]) * bvals[k] for k in range(nb))) for a in range(dim)])


def _rebase(tp: TrigPoly, basis: Basis) -> TrigPoly:
    """Re-express a rational-frequency polynomial in a larger basis whose first entry is 1."""
    if tp.basis == basis:
        return tp
    if not tp.basis.is_rational or basis.names[0] != "1":
        raise ValueError(f"cannot combine frequency bases {tp.basis.names} and {basis.names}")
    nb = basis.size
    out = {}
    for xi, c in tp.items():
        full = []
        for v in xi:
            full.extend([v] + [Fraction(0)] * (nb - 1))
        out[tuple(full)] = c
    return TrigPoly(out, tp.dim, basis, tp.mode)


def _eta(freq: tuple, f: TrigPoly, mode: str):
    """Numeric frequency vector for evaluating a symbol (exact Fractions when possible)."""
    if f.basis.is_rational:
        return tuple(freq) if mode == EXACT else tuple(float(v) for v in freq)
    if mode == EXACT:
        return None
    return tuple(float(v) for v in f.freq_value(freq))


def _bracket(eta) -> float:
    return math.sqrt(1.0 + sum(float(v) ** 2 for v in eta))


def _frozen(sym: SymbolExpr, eta, mode, freq) -> TrigPoly:
    try:
        return sym.at_xi(eta, mode)
    except DomainError as exc:
        raise DomainError(f"symbol denominator vanishes at frequency {list(map(str, freq))}",
                          point=list(map(str, freq))) from exc


def apply_symbol(a: SymbolExpr, f: TrigPoly, A: float = 0.0,
                 low: SymbolExpr | None = None) -> APFunction:
    """``a(x, D) f = sum_eta f_eta a(x, eta) e_eta``.

    Frequencies with ``<eta> < A`` are passed to ``low`` when given and
    refused otherwise.
    """
    if a.nvars != 2:
        raise ValueError("apply_symbol expects a symbol; use apply_amplitude for amplitudes")
    if a.d != f.dim:
        raise DimensionError(f"symbol dimension {a.d} does not match input dimension {f.dim}")
    mode = EXACT if (a.mode == EXACT and f.mode == EXACT and (low is None or low.mode == EXACT)) else FLOAT
    if f.mode != mode:
        f = f.to_mode(mode)
    terms = []
    for freq in f.frequencies:
        fhat = f.bohr_coeff(freq)
        eta = _eta(freq, f, mode)
        if eta is None:
            raise ExactModeError("exact evaluation at irrational frequencies is not supported")
        sym = a
        if A > 0 and _bracket(eta) < A:
            if low is None:
                raise DomainError(f"frequency {list(map(str, freq))} lies below the validity radius A = {A}",
                                  point=list(map(str, freq)))
            sym = low
        try:
            tp = _frozen(sym, eta, mode, freq)
        except NotCollapsible:
            terms.append(APTerm(freq, symbol=sym, xi_value=tuple(float(v) for v in eta),
                                fhat=complex(fhat)))
            continue
        terms.append(APTerm(freq, coeff=_rebase(tp, f.basis).scale(fhat)))
    return APFunction(terms, f.dim, f.basis, mode)


def split_amplitude(a: SymbolExpr) -> dict:
    """Write an amplitude as ``sum_mu g_mu(x, xi) e_mu(y)``; returns ``{mu: g_mu}``.

    Only the polynomial parts may depend on y; quotient bases must be
    functions of x alone.
    """
    if a.nvars != 3:
        raise ValueError("split_amplitude expects an amplitude")
    d = a.d
    for b in a.bases():
        for tp in b.trigpolys():
            half = d * tp.basis.size
            if any(any(xi[half:]) for xi in tp.frequencies):
                raise NotCollapsible("denominators depend on y; the amplitude is not a finite sum in y")
    out: dict = {}
    for factors, poly in a.terms.items():
        nf = frozenset((b if not isinstance(b, SymbolExpr) else b.diagonal(), e) for b, e in factors)
        for alpha, c in poly.terms.items():
            for mu, g in c.split_halves().items():
                term = SymbolExpr({nf: _xipoly({alpha: g}, d)}, d, 2, a.basis)
                out[mu] = out[mu] + term if mu in out else term
    return out


def _xipoly(terms, d):
    from .symexpr import XiPoly
    return XiPoly(terms, d, d)


def apply_amplitude(a: SymbolExpr, f: TrigPoly, A: float = 0.0,
                    low: SymbolExpr | None = None) -> APFunction:
    """Closed form ``sum_eta sum_mu f_eta g_mu(x, eta + mu) e_(eta + mu)``."""
    if a.nvars == 2:
        return apply_symbol(a, f, A, low)
    if a.d != f.dim:
        raise DimensionError("amplitude and input dimensions differ")
    parts = split_amplitude(a)
    mode = EXACT if (a.mode == EXACT and f.mode == EXACT) else FLOAT
    if f.mode != mode:
        f = f.to_mode(mode)
    terms = []
    for freq in f.frequencies:
        fhat = f.bohr_coeff(freq)
        for mu, g in parts.items():
            shifted = freq_add(freq, _rebase(TrigPoly({mu: 1}, f.dim, a.basis), f.basis).frequencies[0])
            eta = _eta(shifted, f, mode)
            if eta is None:
                raise ExactModeError("exact evaluation at irrational frequencies is not supported")
            sym = g
            if A > 0 and _bracket(eta) < A:
                if low is None:
                    raise DomainError(f"frequency {list(map(str, shifted))} lies below the validity radius A = {A}",
                                      point=list(map(str, shifted)))
                sym = low
            try:
                tp = _frozen(sym, eta, mode, shifted)
            except NotCollapsible:
                terms.append(APTerm(shifted, symbol=sym, xi_value=tuple(float(v) for v in eta),
                                    fhat=complex(fhat)))
                continue
            terms.append(APTerm(shifted, coeff=_rebase(tp, f.basis).scale(fhat)))
    return APFunction(terms, f.dim, f.basis, mode)


def compose_direct(a: SymbolExpr, b: SymbolExpr, f: TrigPoly) -> APFunction:
    """``a(x, D) (b(x, D) f)`` computed in two steps."""
    inner = apply_symbol(b, f)
    if not inner.collapsible:
        raise NotCollapsible("b(x, D) f is not a trigonometric polynomial; compare sampled values instead")
    return apply_symbol(a, inner.collapse())


def adjoint_amplitude(a: SymbolExpr) -> SymbolExpr:
    """Amplitude ``conj(a(y, x, xi))`` of the formal adjoint of ``a(x, D)``."""
    amp = a.as_amplitude("x") if a.nvars == 2 else a
    return amp.swap_xy().conj()


def transpose_amplitude(a: SymbolExpr) -> SymbolExpr:
    """Amplitude ``a(y, x, -xi)`` of the transpose of ``a(x, D)``."""
    amp = a.as_amplitude("x") if a.nvars == 2 else a
    return amp.swap_xy().neg_xi()


@dataclass
class ResidualReport:
    norms: dict
    method: str
    n_terms: int
    exact_zero: bool

    def to_json(self) -> dict:
        return {"norms": self.norms, "method": self.method, "n_terms": self.n_terms,
                "exact_zero": self.exact_zero}


def residual_norms(g: APFunction | TrigPoly, f: TrigPoly, norms: Sequence[NormParams],
                   points_per_axis: int = 64) -> ResidualReport:
    """Norms of ``g - f`` under each weight (exact route when ``g`` collapses)."""
    if isinstance(g, TrigPoly):
        g = APFunction.from_trigpoly(g)
    method = "exact" if g.collapsible else "sampled"
    gc = g.coefficients(points_per_axis)
    if gc.mode != f.mode:
        gc, f = gc.to_mode(FLOAT), f.to_mode(FLOAT)
    diff = gc - f
    return ResidualReport({p.label(): norm(diff, p) for p in norms}, method, len(diff),
                          diff.is_zero() and diff.mode == EXACT)
