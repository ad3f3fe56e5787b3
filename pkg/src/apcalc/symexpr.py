"""Symbols a(x, xi) and amplitudes a(x, y, xi) as closed expressions.

Every expression is kept in a normal form

    sum_k  P_k(space; xi) * prod_j B_j ** e_j

where ``P_k`` is a polynomial in xi whose coefficients are trigonometric
polynomials in the space variables (x, or (x, y) for amplitudes) and the
``B_j`` are either the bracket ``<xi> = (1 + |xi|^2)^(1/2)`` (real exponent)
or another expression (integer exponent).  Products merge equal bases,
sums collect terms with equal factor sets, and zero terms are dropped.
There is no rational-function GCD; quotients stay as negative powers.

Derivatives in x, y and xi are exact and memoised on each node, which keeps
the parametrix recursion from rebuilding shared subtrees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .scalars import EXACT, FLOAT, ExactScalar, convert, two_pi_i
from .trigpoly import (RATIONAL, Basis, TrigPoly, multi_factorial, multi_indices,
                       quasi_period, uniform_grid)


class DomainError(ArithmeticError):
    """A denominator vanished at an evaluation point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NotCollapsible(ValueError):
    """Partial evaluation at fixed xi does not give a trigonometric polynomial."""


def _zero_alpha(d):
    return (0,) * d


def _alpha_add(a, b):
    return tuple(i + j for i, j in zip(a, b))


# ---------------------------------------------------------------------------


class XiPoly:
    """Polynomial in xi with trigonometric-polynomial coefficients in the space variables."""

    __slots__ = ("d", "space_dim", "terms", "_hash")

    def __init__(self, terms: Mapping, d: int, space_dim: int):
        self.d = d
        self.space_dim = space_dim
        self.terms = {a: c for a, c in terms.items() if not c.is_zero()}
        self._hash = None

    @classmethod
    def constant(cls, tp: TrigPoly, d: int) -> "XiPoly":
        return cls({_zero_alpha(d): tp}, d, tp.dim)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, XiPoly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def _any(self) -> TrigPoly:
        return next(iter(self.terms.values()))

    @property
    def mode(self):
        if not self.terms:
            return EXACT
        return FLOAT if any(c.mode == FLOAT for c in self.terms.values()) else EXACT

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def scalar_value(self):
        """The value when this is a constant; ``None`` otherwise."""
        if not self.terms:
            return 0
        if list(self.terms) != [_zero_alpha(self.d)]:
            return None
        c = self.terms[_zero_alpha(self.d)]
        if not c.is_constant():
            return None
        return c.mean_value()

    def __add__(self, other: "XiPoly") -> "XiPoly":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return XiPoly(out, self.d, self.space_dim)

    def __neg__(self):
        return XiPoly({a: -c for a, c in self.terms.items()}, self.d, self.space_dim)

    def __mul__(self, other: "XiPoly") -> "XiPoly":
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = _alpha_add(a, b)
                p = ca * cb
                out[k] = out[k] + p if k in out else p
        return XiPoly(out, self.d, self.space_dim)

    def scale(self, c) -> "XiPoly":
        return XiPoly({a: v.scale(c) for a, v in self.terms.items()}, self.d, self.space_dim)

    def map_coeffs(self, fn) -> "XiPoly":
        out: dict = {}
        for a, c in self.terms.items():
            v = fn(c)
            out[a] = out[a] + v if a in out else v
        space = next(iter(out.values())).dim if out else self.space_dim
        return XiPoly(out, self.d, space)

    def d_space(self, axis: int) -> "XiPoly":
        alpha = tuple(1 if k == axis else 0 for k in range(self.space_dim))
        return self.map_coeffs(lambda c: c.derivative(alpha))

    def d_xi(self, i: int) -> "XiPoly":
        out = {}
        for a, c in self.terms.items():
            if a[i]:
                b = tuple(v - 1 if k == i else v for k, v in enumerate(a))
                out[b] = c.scale(a[i])
        return XiPoly(out, self.d, self.space_dim)

    def neg_xi(self) -> "XiPoly":
        return XiPoly({a: (-c if sum(a) % 2 else c) for a, c in self.terms.items()},
                      self.d, self.space_dim)

    def eval(self, space: np.ndarray, xi: np.ndarray, cache: dict) -> np.ndarray:
        out = np.zeros(xi.shape[0], dtype=complex)
        for a, c in self.terms.items():
            key = ("tp", id(c))
            if key not in cache:
                cache[key] = c.evaluate(space) if not c.is_constant() else \
                    np.full(space.shape[0], complex(c.mean_value()))
            mono = np.ones(xi.shape[0])
            for i, k in enumerate(a):
                if k:
                    mono = mono * xi[:, i] ** k
            out += cache[key] * mono
        return out

    def at_xi(self, eta: Sequence, mode: str) -> TrigPoly:
        total = None
        for a, c in self.terms.items():
            mono = convert(1, mode)
            for i, k in enumerate(a):
                if k:
                    mono = mono * convert(eta[i], mode) ** k
            v = c.scale(mono) if c.mode == mode else c.to_mode(mode).scale(mono)
            total = v if total is None else total + v
        if total is None:
            return TrigPoly.zero(self.space_dim, mode=mode)
        return total

    def trigpolys(self):
        return list(self.terms.values())


class _BracketBase:
    """Marker for the base <xi>; a single shared instance."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "<xi>"

    def __reduce__(self):
        return (_BracketBase, ())


BRACKET = _BracketBase()


def _merge_factors(f1: frozenset, f2: frozenset) -> frozenset:
    d = dict(f1)
    for b, e in f2:
        d[b] = d.get(b, 0) + e
    return frozenset((b, e) for b, e in d.items() if e != 0)


def _cancel(terms: dict, d: int, space_dim: int, basis) -> dict:
    """Fold ``q * B^-k`` into ``B^(1-k)`` when the coefficient ``q`` is the polynomial base ``B``."""
    if all(e > 0 for k in terms for _, e in k):
        return terms
    out: dict = {}
    for k, p in terms.items():
        for b, e in k:
            if e < 0 and isinstance(b, SymbolExpr) and len(b.terms) == 1 and b.terms.get(frozenset()) == p:
                k = _merge_factors(k, frozenset({(b, 1)}))
                p = XiPoly.constant(TrigPoly.constant(1, space_dim, basis, p.mode), d)
                break
        out[k] = out[k] + p if k in out else p
    return {k: p for k, p in out.items() if not p.is_zero()}


def _is_int(e):
    return isinstance(e, int) or (isinstance(e, Fraction) and e.denominator == 1) or \
        (isinstance(e, float) and e.is_integer())


class SymbolExpr:
    """Immutable expression for a symbol (``nvars=2``) or amplitude (``nvars=3``)."""

    __slots__ = ("d", "nvars", "basis", "terms", "_hash", "_dcache")

    def __init__(self, terms: Mapping, d: int, nvars: int = 2, basis: Basis = RATIONAL):
        if nvars not in (2, 3):
            raise ValueError("nvars must be 2 (symbol) or 3 (amplitude)")
        self.d = d
        self.nvars = nvars
        self.basis = basis
        self.terms = _cancel({k: p for k, p in terms.items() if not p.is_zero()}, d, self.space_dim, basis)
        self._hash = None
        self._dcache = {}

    # construction -------------------------------------------------------
    @property
    def space_dim(self):
        return self.d * (self.nvars - 1)

    @classmethod
    def from_poly(cls, poly: XiPoly, nvars: int = 2, basis: Basis = RATIONAL) -> "SymbolExpr":
        return cls({frozenset(): poly}, poly.d, nvars, basis)

    def _empty(self):
        return SymbolExpr({}, self.d, self.nvars, self.basis)

    def _poly_const(self, value, mode=None) -> XiPoly:
        mode = mode or self.mode
        tp = TrigPoly.constant(value, self.space_dim, self.basis, mode)
        return XiPoly.constant(tp, self.d)

    @property
    def mode(self) -> str:
        modes = {p.mode for p in self.terms.values() if p.terms}
        for key in self.terms:
            for b, _ in key:
                if isinstance(b, SymbolExpr):
                    modes.add(b.mode)
        return FLOAT if FLOAT in modes else EXACT

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SymbolExpr):
            return NotImplemented
        return (self.d == other.d and self.nvars == other.nvars and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.d, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"SymbolExpr({self.to_string()})"

    def is_polynomial(self) -> bool:
        return all(not k for k in self.terms)

    def xi_degree(self) -> int:
        if not self.is_polynomial():
            raise ValueError("xi-degree is defined for polynomial symbols only")
        return max((p.degree() for p in self.terms.values()), default=0)

    def as_poly(self) -> XiPoly:
        if not self.is_polynomial():
            raise ValueError("not a polynomial symbol")
        return self.terms.get(frozenset(), XiPoly({}, self.d, self.space_dim))

    def is_x_independent(self) -> bool:
        def tp_const(p):
            return all(c.is_constant() for c in p.terms.values())

        for k, p in self.terms.items():
            if not tp_const(p):
                return False
            for b, _ in k:
                if isinstance(b, SymbolExpr) and not b.is_x_independent():
                    return False
        return True

    # arithmetic ---------------------------------------------------------
    def _lift(self, other) -> "SymbolExpr":
        if isinstance(other, SymbolExpr):
            if other.d != self.d:
                raise ValueError("dimension mismatch")
            if other.nvars != self.nvars:
                raise ValueError("cannot mix symbols and amplitudes; embed first")
            return other
        if isinstance(other, TrigPoly):
            return trig(other, self.d) if self.nvars == 2 else trig_xy(other.embed(2 * self.d, 0), self.d)
        return SymbolExpr.from_poly(self._poly_const(other, FLOAT if isinstance(other, (float, complex)) else self.mode),
                                    self.nvars, self.basis)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = out[k] + p if k in out else p
        return SymbolExpr(out, self.d, self.nvars, self.basis)

    __radd__ = __add__

    def __neg__(self):
        return SymbolExpr({k: -p for k, p in self.terms.items()}, self.d, self.nvars, self.basis)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (SymbolExpr, TrigPoly)):
            return self.scale(other)
        other = self._lift(other)
        out: dict = {}
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                k = _merge_factors(k1, k2)
                p = p1 * p2
                out[k] = out[k] + p if k in out else p
        return SymbolExpr(out, self.d, self.nvars, self.basis)

    def __rmul__(self, other):
        if isinstance(other, TrigPoly):
            return self._lift(other) * self
        return self.scale(other)

    def scale(self, c) -> "SymbolExpr":
        return SymbolExpr({k: p.scale(c) for k, p in self.terms.items()}, self.d, self.nvars, self.basis)

    def __pow__(self, n: int):
        if not _is_int(n):
            raise ValueError("only integer powers of expressions are supported; use bracket(m) for <xi>^m")
        n = int(n)
        if n == 0:
            return self._lift(1)
        if n > 0:
            out = self
            for _ in range(n - 1):
                out = out * self
            return out
        return self._inverse() ** (-n)

    def _inverse(self) -> "SymbolExpr":
        if self.is_zero():
            raise DomainError("division by the zero expression")
        if len(self.terms) == 1:
            (key, poly), = self.terms.items()
            inv_factors = frozenset((b, -e) for b, e in key)
            c = poly.scalar_value()
            if c is not None:
                return SymbolExpr({inv_factors: self._poly_const(1 / convert(c, poly.mode), poly.mode)},
                                  self.d, self.nvars, self.basis)
            if key:
                base = SymbolExpr.from_poly(poly, self.nvars, self.basis)
                return SymbolExpr({_merge_factors(inv_factors, frozenset({(base, -1)})):
                                   self._poly_const(1)}, self.d, self.nvars, self.basis)
        return SymbolExpr({frozenset({(self, -1)}): self._poly_const(1)}, self.d, self.nvars, self.basis)

    def __truediv__(self, other):
        if not isinstance(other, (SymbolExpr, TrigPoly)):
            return self.scale(1 / convert(other, self.mode))
        return self * self._lift(other)._inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self._inverse()

    # differentiation ----------------------------------------------------
    def _derive(self, kind: str, i: int) -> "SymbolExpr":
        key = (kind, i)
        hit = self._dcache.get(key)
        if hit is not None:
            return hit
        out = self._empty()
        for factors, poly in self.terms.items():
            dp = poly.d_xi(i) if kind == "xi" else poly.d_space(i if kind == "x" else self.d + i)
            if not dp.is_zero():
                out = out + SymbolExpr({factors: dp}, self.d, self.nvars, self.basis)
            for b, e in factors:
                rest = frozenset((bb, ee) for bb, ee in factors if bb is not b)
                if b is BRACKET:
                    if kind != "xi":
                        continue
                    # d<xi>^e = e xi_i <xi>^(e-2)
                    alpha = tuple(1 if k == i else 0 for k in range(self.d))
                    xi_i = XiPoly({alpha: TrigPoly.constant(e if not isinstance(e, float) else e,
                                                            self.space_dim, self.basis, poly.mode)},
                                  self.d, self.space_dim)
                    nf = _merge_factors(rest, frozenset({(BRACKET, e - 2)}))
                    out = out + SymbolExpr({nf: poly * xi_i}, self.d, self.nvars, self.basis)
                else:
                    db = b._derive(kind, i)
                    if db.is_zero():
                        continue
                    nf = _merge_factors(rest, frozenset({(b, e - 1)}))
                    head = SymbolExpr({nf: poly.scale(e)}, self.d, self.nvars, self.basis)
                    out = out + head * db
        self._dcache[key] = out
        return out

    def dx(self, i: int) -> "SymbolExpr":
        return self._derive("x", i)

    def dy(self, i: int) -> "SymbolExpr":
        if self.nvars != 3:
            raise ValueError("dy is only defined for amplitudes")
        return self._derive("y", i)

    def dxi(self, i: int) -> "SymbolExpr":
        return self._derive("xi", i)

    def d_multi(self, xi_alpha=None, x_alpha=None, y_alpha=None) -> "SymbolExpr":
        out = self
        for kind, alpha in (("x", x_alpha), ("y", y_alpha), ("xi", xi_alpha)):
            if alpha is None:
                continue
            for i, k in enumerate(alpha):
                for _ in range(k):
                    out = out._derive(kind, i)
        return out

    # structural maps ----------------------------------------------------
    def _map(self, poly_fn, nvars=None, memo=None) -> "SymbolExpr":
        memo = {} if memo is None else memo
        nvars = nvars or self.nvars
        if id(self) in memo:
            return memo[id(self)]
        out = SymbolExpr({}, self.d, nvars, self.basis)
        for factors, poly in self.terms.items():
            nf = frozenset((b if b is BRACKET else b._map(poly_fn, nvars, memo), e) for b, e in factors)
            nf = _merge_factors(frozenset(), nf)
            out = out + SymbolExpr({nf: poly_fn(poly)}, self.d, nvars, self.basis)
        memo[id(self)] = out
        return out

    def neg_xi(self) -> "SymbolExpr":
        """``a(x, -xi)``."""
        return self._map(lambda p: p.neg_xi())

    def conj(self) -> "SymbolExpr":
        """Complex conjugate for real xi."""
        return self._map(lambda p: p.map_coeffs(lambda c: c.conj()))

    def swap_xy(self) -> "SymbolExpr":
        """``a(x, y, xi) -> a(y, x, xi)``."""
        self._need_amp()
        return self._map(lambda p: p.map_coeffs(lambda c: c.swap_halves()))

    def diagonal(self) -> "SymbolExpr":
        """Restrict an amplitude to ``y = x``."""
        self._need_amp()
        return self._map(lambda p: p.map_coeffs(lambda c: c.diagonal()), nvars=2)

    def as_amplitude(self, var: str = "x") -> "SymbolExpr":
        """View a symbol as an amplitude depending on x (``var='x'``) or y."""
        if self.nvars != 2:
            raise ValueError("already an amplitude")
        offset = 0 if var == "x" else self.d
        return self._map(lambda p: p.map_coeffs(lambda c: c.embed(2 * self.d, offset)), nvars=3)

    def to_mode(self, mode: str) -> "SymbolExpr":
        return self._map(lambda p: p.map_coeffs(lambda c: c.to_mode(mode)))

    def _need_amp(self):
        if self.nvars != 3:
            raise ValueError("operation requires an amplitude (nvars=3)")

    def bases(self):
        seen = {}

        def walk(e):
            for k in e.terms:
                for b, _ in k:
                    if b is not BRACKET and id(b) not in seen:
                        seen[id(b)] = b
                        walk(b)

        walk(self)
        return list(seen.values())

    def trigpolys(self) -> list:
        out = []
        for e in [self] + self.bases():
            for p in e.terms.values():
                out.extend(p.trigpolys())
        return out

    def space_frequencies(self) -> list:
        return sorted({xi for tp in self.trigpolys() for xi, _ in tp.items()})

    def node_count(self) -> int:
        return sum(len(p.terms) for e in [self] + self.bases() for p in e.terms.values())

    # evaluation ---------------------------------------------------------
    def eval(self, x, xi, y=None) -> np.ndarray | complex:
        """Evaluate at points; ``x``, ``xi`` (and ``y``) broadcast row-wise.

        Accepts shapes ``(d,)`` or ``(n, d)`` (or scalars when ``d == 1``).
        """
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        scalar = x.ndim <= (0 if self.d == 1 else 1) and xi.ndim <= (0 if self.d == 1 else 1)
        X = np.atleast_1d(x).reshape(-1, self.d)
        XI = np.atleast_1d(xi).reshape(-1, self.d)
        n = max(X.shape[0], XI.shape[0])
        X = np.broadcast_to(X, (n, self.d))
        XI = np.broadcast_to(XI, (n, self.d))
        if self.nvars == 3:
            if y is None:
                raise ValueError("amplitudes need y")
            Y = np.broadcast_to(np.atleast_1d(np.asarray(y, dtype=float)).reshape(-1, self.d), (n, self.d))
            space = np.concatenate([X, Y], axis=1)
        else:
            space = np.ascontiguousarray(X)
        out = self._eval(space, np.ascontiguousarray(XI), {})
        return complex(out[0]) if scalar else out

    def _eval(self, space, xi, cache) -> np.ndarray:
        key = ("expr", id(self))
        if key in cache:
            return cache[key]
        out = np.zeros(xi.shape[0], dtype=complex)
        for factors, poly in self.terms.items():
            val = poly.eval(space, xi, cache)
            for b, e in factors:
                if b is BRACKET:
                    bk = ("bracket", e)
                    if bk not in cache:
                        cache[bk] = (1.0 + np.sum(xi ** 2, axis=1)) ** (float(e) / 2.0)
                    val = val * cache[bk]
                else:
                    bv = b._eval(space, xi, cache)
                    if e < 0:
                        zero = bv == 0
                        if zero.any():
                            j = int(np.argmax(zero))
                            raise DomainError("denominator vanishes", point=(space[j].tolist(), xi[j].tolist()))
                    val = val * bv ** int(e)
            out += val
        cache[key] = out
        return out

    def at_xi(self, eta: Sequence, mode: str | None = None) -> TrigPoly:
        """Fix xi = eta and return the space function as a trigonometric polynomial.

        Raises :class:`NotCollapsible` when a denominator depends on the space
        variables (or, in exact mode, when a bracket power is irrational).
        """
        mode = mode or self.mode
        return self._at_xi(tuple(eta), mode, {})

    def _at_xi(self, eta, mode, memo) -> TrigPoly:
        if id(self) in memo:
            return memo[id(self)]
        total = TrigPoly.zero(self.space_dim, self.basis, mode)
        for factors, poly in self.terms.items():
            val = poly.at_xi(eta, mode)
            for b, e in factors:
                if b is BRACKET:
                    val = val.scale(_bracket_value(eta, e, mode))
                    continue
                bv = b._at_xi(eta, mode, memo)
                if e > 0:
                    val = val * (bv ** int(e))
                else:
                    if bv.is_zero():
                        raise DomainError(f"denominator vanishes at xi = {list(eta)}", point=list(eta))
                    if not bv.is_constant():
                        raise NotCollapsible("denominator depends on the space variable")
                    val = val.scale(convert(bv.mean_value(), mode) ** int(e))
            total = total + val
        memo[id(self)] = total
        return total

    # printing / serialisation ------------------------------------------
    def to_string(self) -> str:
        names = {}

        def poly_str(p: XiPoly):
            parts = []
            for a, c in sorted(p.terms.items()):
                mono = "*".join(f"xi{i + 1}^{k}" if k > 1 else f"xi{i + 1}" for i, k in enumerate(a) if k)
                parts.append(f"[{c!r}]" + (f"*{mono}" if mono else ""))
            return " + ".join(parts) or "0"

        def expr_str(e: SymbolExpr):
            parts = []
            for k, p in e.terms.items():
                s = f"({poly_str(p)})"
                for b, ex in k:
                    if b is BRACKET:
                        s += f"*<xi>^{ex}"
                    else:
                        if id(b) not in names:
                            names[id(b)] = f"B{len(names)}"
                        s += f"*{names[id(b)]}^{ex}"
                parts.append(s)
            return " + ".join(parts) or "0"

        main = expr_str(self)
        defs = []
        for b in self.bases():
            names.setdefault(id(b), f"B{len(names)}")
        for b in self.bases():
            defs.append(f"{names[id(b)]} = {expr_str(b)}")
        return main + ("; where " + "; ".join(defs) if defs else "")

    def to_json(self) -> dict:
        return {"dim": self.d, "nvars": self.nvars, "basis": list(self.basis.names),
                "expr": _expr_node(self)}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _bracket_value(eta, e, mode):
    sq = sum((convert(v, mode) * convert(v, mode) for v in eta), convert(1, mode))
    if mode == EXACT:
        half = Fraction(e) / 2 if not isinstance(e, float) else None
        if half is None or half.denominator != 1:
            raise NotCollapsible("irrational bracket power in exact mode")
        return sq ** int(half)
    return complex(sq) ** (float(e) / 2.0)


# ---------------------------------------------------------------------------
# atom constructors


def _tp_const(value, space_dim, basis, mode):
    return TrigPoly.constant(value, space_dim, basis, mode)


def const(value, d: int = 1, nvars: int = 2, mode: str = FLOAT, basis: Basis = RATIONAL) -> SymbolExpr:
    space = d * (nvars - 1)
    return SymbolExpr.from_poly(XiPoly.constant(_tp_const(value, space, basis, mode), d), nvars, basis)


def xi_mono(alpha, coeff=1, nvars: int = 2, mode: str = FLOAT, basis: Basis = RATIONAL) -> SymbolExpr:
    """``coeff * xi^alpha``."""
    alpha = tuple(int(a) for a in alpha)
    d = len(alpha)
    tp = _tp_const(coeff, d * (nvars - 1), basis, mode)
    return SymbolExpr({frozenset(): XiPoly({alpha: tp}, d, tp.dim)}, d, nvars, basis)


def xi_var(i: int, d: int = 1, **kw) -> SymbolExpr:
    alpha = tuple(1 if k == i else 0 for k in range(d))
    return xi_mono(alpha, **kw)


def bracket(m, d: int = 1, nvars: int = 2, mode: str = FLOAT, basis: Basis = RATIONAL) -> SymbolExpr:
    """``<xi>^m``; even integer ``m`` stays exact in exact mode."""
    if isinstance(m, float) and m.is_integer():
        m = int(m)
    if isinstance(m, int):
        m = Fraction(m)
    one = XiPoly.constant(_tp_const(1, d * (nvars - 1), basis, mode), d)
    if m == 0:
        return SymbolExpr.from_poly(one, nvars, basis)
    return SymbolExpr({frozenset({(BRACKET, m)}): one}, d, nvars, basis)


def trig(tp: TrigPoly, d: int | None = None) -> SymbolExpr:
    """x-dependent symbol atom."""
    d = d or tp.dim
    return SymbolExpr.from_poly(XiPoly.constant(tp, d), 2, tp.basis)


def trig_xy(tp: TrigPoly, d: int) -> SymbolExpr:
    """Amplitude atom depending jointly on (x, y); ``tp.dim == 2 d``."""
    if tp.dim != 2 * d:
        raise ValueError("joint (x, y) atom needs dimension 2d")
    return SymbolExpr.from_poly(XiPoly.constant(tp, d), 3, tp.basis)


def trig_x(tp: TrigPoly) -> SymbolExpr:
    """Amplitude atom depending on x only."""
    return trig_xy(tp.embed(2 * tp.dim, 0), tp.dim)


def trig_y(tp: TrigPoly) -> SymbolExpr:
    """Amplitude atom depending on y only."""
    return trig_xy(tp.embed(2 * tp.dim, tp.dim), tp.dim)


def poly_symbol(coeffs: Mapping, d: int, nvars: int = 2, mode: str = FLOAT,
                basis: Basis = RATIONAL) -> SymbolExpr:
    """Differential-operator symbol ``sum_alpha c_alpha(space) xi^alpha``.

    Values of ``coeffs`` may be :class:`TrigPoly` (space dimension ``d`` for
    symbols, ``2 d`` for amplitudes) or plain numbers.
    """
    space = d * (nvars - 1)
    terms = {}
    for alpha, c in coeffs.items():
        alpha = tuple(alpha) if isinstance(alpha, (tuple, list)) else (alpha,)
        if not isinstance(c, TrigPoly):
            c = _tp_const(c, space, basis, mode)
        terms[alpha] = terms[alpha] + c if alpha in terms else c
    return SymbolExpr.from_poly(XiPoly(terms, d, space), nvars, basis)


# ---------------------------------------------------------------------------
# JSON


def _complex_node(c):
    z = complex(c)
    node = {"re": z.real, "im": z.imag}
    if isinstance(c, ExactScalar):
        from .trigpoly import exact_to_json
        node["exact"] = exact_to_json(c)
    return node


def _expr_node(e: SymbolExpr, memo=None) -> dict:
    args = []
    space_key = "trigpoly" if e.nvars == 2 else "trigpoly_xy"
    for factors, poly in e.terms.items():
        poly_args = []
        for a, c in poly.terms.items():
            poly_args.append({"op": "mul", "args": [{space_key: c.to_json()},
                                                    {"xi_mono": {"alpha": list(a)}}]})
        fac = [{"op": "add", "args": poly_args}]
        for b, ex in factors:
            if b is BRACKET:
                fac.append({"bracket": {"m": str(ex) if isinstance(ex, Fraction) else ex}})
            else:
                fac.append({"op": "pow", "n": int(ex), "args": [_expr_node(b)]})
        args.append({"op": "mul", "args": fac})
    return {"op": "add", "args": args}


def from_json(data: Mapping, mode: str | None = None) -> SymbolExpr:
    """Parse a symbol definition (wrapper with ``dim``/``nvars``/``expr`` or a bare node)."""
    if "expr" in data:
        d = int(data["dim"])
        nvars = int(data.get("nvars", 2))
        basis = Basis(tuple(data.get("basis", ["1"])))
        node = data["expr"]
        mode = mode or data.get("mode")
    else:
        node = data
        d = _infer_dim(node)
        nvars = 3 if _has_y(node) else 2
        basis = RATIONAL
    return _parse_node(node, d, nvars, basis, mode)


def _infer_dim(node) -> int:
    if isinstance(node, Mapping):
        for key in ("trigpoly", "trigpoly_y", "trigpoly_x"):
            if key in node:
                return int(node[key]["dim"])
        if "trigpoly_xy" in node:
            return int(node["trigpoly_xy"]["dim"]) // 2
        if "xi_mono" in node:
            return len(node["xi_mono"]["alpha"])
        for a in node.get("args", []):
            r = _infer_dim(a)
            if r:
                return r
    return 0 if not isinstance(node, Mapping) else 1


def _has_y(node) -> bool:
    if isinstance(node, Mapping):
        if "trigpoly_y" in node or "trigpoly_xy" in node:
            return True
        return any(_has_y(a) for a in node.get("args", []))
    return False


def _parse_node(node, d, nvars, basis, mode) -> SymbolExpr:
    mode_ = mode or FLOAT
    if "op" in node:
        op = node["op"]
        args = [_parse_node(a, d, nvars, basis, mode) for a in node.get("args", [])]
        if op == "add":
            out = const(0, d, nvars, mode_, basis)
            for a in args:
                out = out + a
            return out
        if op == "mul":
            out = const(1, d, nvars, mode_, basis)
            for a in args:
                out = out * a
            return out
        if op == "sub":
            return args[0] - args[1]
        if op == "neg":
            return -args[0]
        if op == "div":
            return args[0] / args[1]
        if op == "pow":
            return args[0] ** int(node["n"])
        raise ValueError(f"unknown op {op!r}")
    if "trigpoly" in node:
        tp = TrigPoly.from_json(node["trigpoly"], mode)
        if nvars == 2 or tp.dim == 2 * d:
            return trig(tp, d) if nvars == 2 else trig_xy(tp, d)
        return trig_x(tp)
    if "trigpoly_x" in node:
        return trig_x(TrigPoly.from_json(node["trigpoly_x"], mode))
    if "trigpoly_y" in node:
        return trig_y(TrigPoly.from_json(node["trigpoly_y"], mode))
    if "trigpoly_xy" in node:
        return trig_xy(TrigPoly.from_json(node["trigpoly_xy"], mode), d)
    if "xi_mono" in node:
        mono = node["xi_mono"]
        coeff = _parse_scalar(mono.get("coeff", 1), mode_)
        return xi_mono(mono["alpha"], coeff, nvars, mode_, basis)
    if "bracket" in node:
        m = node["bracket"]["m"]
        m = Fraction(m) if isinstance(m, str) else m
        return bracket(m, d, nvars, mode_, basis)
    if "const" in node:
        return const(_parse_scalar(node["const"], mode_), d, nvars, mode_, basis)
    raise ValueError(f"unrecognised node: {sorted(node)}")


def _parse_scalar(v, mode):
    if isinstance(v, Mapping):
        if mode == EXACT and "exact" in v:
            from .trigpoly import exact_from_json
            return exact_from_json(v["exact"])
        if mode == EXACT:
            return ExactScalar.from_number((Fraction(str(v.get("re", 0))), Fraction(str(v.get("im", 0)))))
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, str):
        return Fraction(v) if mode == EXACT else float(Fraction(v))
    return v


# ---------------------------------------------------------------------------
# class verification


@dataclass(frozen=True)
class ClassParams:
    """Constants of the symbol class estimates."""

    m: float
    rho: float = 1.0
    delta: float = 0.0
    s: float = 1.0
    C: float = 1.0
    B: float = 1.0
    M: int = 1

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if not self.rho > self.delta:
            raise ValueError("need rho > delta")
        if self.s < 1 or self.s * (self.rho - self.delta) < 1 - 1e-12:
            raise ValueError("need s >= 1 and s (rho - delta) >= 1")
        if self.C <= 0 or self.B <= 0:
            raise ValueError("C and B must be positive")

    def check_dim(self, d: int):
        if not self.M > d / 2:
            raise ValueError(f"M must exceed d/2 = {d / 2}")

    def shifted(self, dm: float) -> "ClassParams":
        return ClassParams(self.m + dm, self.rho, self.delta, self.s, self.C, self.B, self.M)


@dataclass
class Sampler:
    """Sampling plan: log-spaced radii along fixed and seeded random directions, x on a grid."""

    radii: Sequence[float] = field(default_factory=lambda: np.logspace(0, 3, 25))
    n_random: int = 8
    seed: int = 0
    x_points: int = 16
    x_period: Sequence[float] | None = None

    def directions(self, d: int) -> np.ndarray:
        dirs = [v for i in range(d) for v in (np.eye(d)[i], -np.eye(d)[i])]
        rng = np.random.default_rng(self.seed)
        for _ in range(self.n_random):
            v = rng.normal(size=d)
            dirs.append(v / np.linalg.norm(v))
        return np.unique(np.round(np.array(dirs), 15), axis=0)

    def xi_points(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        dirs = self.directions(d)
        r = np.asarray(self.radii, dtype=float)
        pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
        rad = np.repeat(r, dirs.shape[0])
        return pts, rad

    def x_points_for(self, expr_or_tps, d: int) -> np.ndarray:
        if self.x_period is not None:
            period = np.broadcast_to(np.asarray(self.x_period, dtype=float), (d,))
        else:
            tps = expr_or_tps if isinstance(expr_or_tps, list) else expr_or_tps.trigpolys()
            period = quasi_period(tps) if tps else np.ones(d)
            period = period[:d] if len(period) >= d else np.ones(d)
        return uniform_grid(period, self.x_points)


def product_grid(xs: np.ndarray, xis: np.ndarray):
    """Cartesian product rows: every x with every xi."""
    nx, nxi = xs.shape[0], xis.shape[0]
    X = np.repeat(xs, nxi, axis=0)
    XI = np.tile(xis, (nx, 1))
    return X, XI


def log_slope(r: np.ndarray, v: np.ndarray) -> float:
    """Least-squares slope of log v against log r (positive entries only)."""
    mask = (v > 0) & np.isfinite(v) & (r > 0)
    if mask.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(r[mask]), np.log(v[mask]), 1)[0])


def top_decade(radii: np.ndarray) -> np.ndarray:
    rmax = radii.max()
    return radii >= rmax / 10.0


GROWTH_TOL = 0.05


@dataclass
class ClassReport:
    passed: bool
    passed_fitted: bool
    C_declared: float
    C_fit: float
    worst_ratio: float
    worst_orders: tuple
    witness: dict | None
    growth_slopes: dict
    growth_orders: list

    def to_json(self) -> dict:
        return {
            "pass": self.passed, "pass_at_fitted_C": self.passed_fitted,
            "C_declared": self.C_declared, "C_fit": self.C_fit,
            "worst_ratio": self.worst_ratio, "worst_orders": list(self.worst_orders),
            "witness": self.witness,
            "growth_slopes": {f"xi{list(k[0])}_x{list(k[1])}": v for k, v in self.growth_slopes.items()},
            "growth_orders": [[list(a), list(b)] for a, b in self.growth_orders],
        }


def verify_class(a: SymbolExpr, params: ClassParams, max_order: int = 2,
                 sampler: Sampler | None = None) -> ClassReport:
    """Sample the symbol-class estimates for all derivative orders up to ``max_order``.

    The xi-order ``alpha`` carries ``alpha!`` and ``<xi>^(m - rho|alpha| + delta|beta|)``;
    the x-order ``beta`` carries ``(beta!)^(s (rho - delta))``.  Where
    ``<xi> < B |alpha|^s`` the weight drops the bracket (only for
    ``|alpha| <= 2M``).  Besides the worst ratio at the declared ``C`` the
    report fits the smallest ``C`` that makes every sampled ratio at most 1,
    and flags orders whose ratio grows with ``<xi>`` (slope of the per-radius
    maximum above ``0.05`` over the top decade), since no constant absorbs
    such growth.
    """
    if max_order > 6:
        raise ValueError("max_order is limited to 6")
    if a.nvars != 2:
        raise ValueError("verify_class expects a symbol a(x, xi)")
    d = a.d
    params.check_dim(d)
    sampler = sampler or Sampler()
    xs = sampler.x_points_for(a, d)
    xis, rad = sampler.xi_points(d)
    X, XI = product_grid(xs, xis)
    R = np.tile(rad, xs.shape[0])
    br = np.sqrt(1.0 + np.sum(XI ** 2, axis=1))
    sr = params.s * (params.rho - params.delta)

    worst, worst_orders, witness = 0.0, None, None
    C_fit = 0.0
    slopes, growth = {}, []
    grow_witness = None
    for total in range(max_order + 1):
        for k in range(total + 1):
            for alpha in multi_indices(d, k, k):
                for beta in multi_indices(d, total - k, total - k):
                    deriv = a.d_multi(xi_alpha=alpha, x_alpha=beta)
                    la, lb = sum(alpha), sum(beta)
                    fac = multi_factorial(beta) ** sr * multi_factorial(alpha)
                    big = br >= params.B * la ** params.s
                    use = big | (la <= 2 * params.M)
                    if deriv.is_zero():
                        continue
                    vals = np.abs(deriv.eval(X, XI))
                    weight = np.where(big, br ** (params.m - params.rho * la + params.delta * lb), 1.0) * fac
                    ratio_c1 = np.where(use, vals / weight, 0.0)
                    power = 1 + la + lb
                    ratio = ratio_c1 / params.C ** power
                    j = int(np.argmax(ratio))
                    if ratio[j] > worst:
                        worst, worst_orders = float(ratio[j]), (alpha, beta)
                        witness = {"x": X[j].tolist(), "xi": XI[j].tolist(), "ratio": float(ratio[j])}
                    C_fit = max(C_fit, float(np.max(ratio_c1)) ** (1.0 / power))
                    # growth trend of the per-radius maximum
                    radii = np.unique(R[big])
                    if radii.size >= 3:
                        per = np.array([ratio_c1[big & (R == r)].max() for r in radii])
                        sel = top_decade(radii)
                        sl = log_slope(np.sqrt(1 + radii[sel] ** 2), per[sel])
                        slopes[(alpha, beta)] = sl
                        if sl > GROWTH_TOL:
                            growth.append((alpha, beta))
                            mask = big & (R == radii[-1])
                            jj = int(np.argmax(np.where(mask, ratio_c1, -1.0)))
                            if grow_witness is None:
                                grow_witness = {"x": X[jj].tolist(), "xi": XI[jj].tolist(),
                                                "ratio_at_C_fit": float(ratio_c1[jj] / max(C_fit, 1e-300) ** power),
                                                "orders": [list(alpha), list(beta)], "slope": sl}
    passed_fitted = not growth
    passed = passed_fitted and worst <= 1.0
    if growth:
        witness = grow_witness
    elif passed:
        witness = None
    return ClassReport(passed, passed_fitted, params.C, C_fit, worst,
                       worst_orders or ((0,) * d, (0,) * d), witness, slopes, growth)
