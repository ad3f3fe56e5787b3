"""Sparse trigonometric polynomials over exact rational frequencies.

A :class:`TrigPoly` stores ``f(x) = sum_xi c_xi exp(2 pi i xi . x)`` as a map
from frequency to coefficient.  Frequencies are tuples of
:class:`fractions.Fraction`; with a non-trivial :class:`Basis` (for example
``("1", "sqrt(2)")``) every axis carries one rational coordinate per basis
number, so incommensurable frequencies still match exactly.

Coefficients are Python ``complex`` in float mode and
:class:`~apcalc.scalars.ExactScalar` in exact mode.
"""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .scalars import EXACT, FLOAT, ExactScalar, check_mode, convert, two_pi_i

PRUNE_RTOL = 1e-14


class DimensionError(ValueError):
    pass


class ExactModeError(ValueError):
    """Raised when an exact computation would need an irrational number."""


# ---------------------------------------------------------------------------
# frequency basis

_SAFE_FUNCS = {"sqrt": math.sqrt, "pi": math.pi, "e": math.e, "cbrt": lambda v: v ** (1 / 3)}


def _eval_real(text: str) -> float:
    node = ast.parse(text, mode="eval").body

    def ev(n):
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float)):
            return float(n.value)
        if isinstance(n, ast.Name) and n.id in ("pi", "e"):
            return _SAFE_FUNCS[n.id]
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.USub, ast.UAdd)):
            v = ev(n.operand)
            return -v if isinstance(n.op, ast.USub) else v
        if isinstance(n, ast.BinOp):
            ops = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
                   ast.Div: operator.truediv, ast.Pow: operator.pow}
            if type(n.op) in ops:
                return ops[type(n.op)](ev(n.left), ev(n.right))
        if isinstance(n, ast.Call) and isinstance(n.func, ast.Name) and n.func.id in ("sqrt", "cbrt"):
            return _SAFE_FUNCS[n.func.id](ev(n.args[0]))
        raise ValueError(f"unsupported basis expression: {text!r}")

    return float(ev(node))


@dataclass(frozen=True)
class Basis:
    """Real numbers whose rational combinations form the frequency coordinates."""

    names: tuple = ("1",)

    def __post_init__(self):
        if not self.names:
            raise ValueError("basis must contain at least one number")
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))

    @property
    def values(self) -> np.ndarray:
        return np.array([_eval_real(n) for n in self.names])

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def is_rational(self) -> bool:
        return self.names == ("1",)


RATIONAL = Basis(("1",))


def make_freq(*components, basis: Basis = RATIONAL) -> tuple:
    """Build a frequency tuple.

    With the rational basis each component is a number.  With a larger
    basis each component is a sequence of coordinates, one per basis number.
    """
    out = []
    for c in components:
        if basis.size == 1:
            if isinstance(c, (tuple, list)):
                (c,) = c
            out.append(Fraction(c))
        else:
            coords = tuple(c) if isinstance(c, (tuple, list)) else (c,) + (0,) * (basis.size - 1)
            if len(coords) != basis.size:
                raise ValueError("coordinate count must match the basis size")
            out.extend(Fraction(v) for v in coords)
    return tuple(out)


def freq_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def freq_neg(a: tuple) -> tuple:
    return tuple(-x for x in a)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormParams:
    """Weighted l^p norm of Bohr-Fourier coefficients.

    Give ``t`` for the polynomial weight ``<xi>^t`` or ``s`` and ``eps`` for the
    exponential weight ``exp(-eps |xi|^(1/s))``.  With neither, the norm is the
    plain l^p norm.
    """

    p: float = 1.0
    t: float | None = None
    s: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("p must lie in [1, inf]")
        if self.t is not None and (self.s is not None or self.eps is not None):
            raise ValueError("choose either a polynomial weight t or an exponential weight (s, eps)")
        if (self.s is None) != (self.eps is None):
            raise ValueError("exponential weight needs both s and eps")
        if self.s is not None and self.s < 1:
            raise ValueError("s must be >= 1")

    def weight(self, radius: np.ndarray) -> np.ndarray:
        radius = np.asarray(radius, dtype=float)
        if self.t is not None:
            return (1.0 + radius ** 2) ** (self.t / 2.0)
        if self.s is not None:
            return np.exp(-self.eps * radius ** (1.0 / self.s))
        return np.ones_like(radius)

    def label(self) -> str:
        if self.t is not None:
            return f"W^{self.p}_t={self.t}"
        if self.s is not None:
            return f"W^{self.p}_(s={self.s},eps={self.eps})"
        return f"l^{self.p}"


class TrigPoly:
    """Immutable sparse trigonometric polynomial."""

    __slots__ = ("dim", "basis", "mode", "_terms", "_hash")

    def __init__(self, terms: Mapping | None = None, dim: int = 1,
                 basis: Basis = RATIONAL, mode: str = FLOAT):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.basis = basis
        self.mode = check_mode(mode)
        width = dim * basis.size
        clean = {}
        for xi, c in (terms or {}).items():
            xi = tuple(Fraction(v) for v in xi)
            if len(xi) != width:
                raise DimensionError(f"frequency {xi} has {len(xi)} coordinates, expected {width}")
            c = convert(c, mode)
            if xi in clean:
                clean[xi] = clean[xi] + c
            else:
                clean[xi] = c
        self._terms = _prune(clean, mode)
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, dim: int, basis: Basis, mode: str) -> "TrigPoly":
        obj = cls.__new__(cls)
        obj.dim, obj.basis, obj.mode = dim, basis, mode
        obj._terms = _prune(terms, mode)
        obj._hash = None
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def exp(cls, xi, coeff=1, dim: int | None = None, basis: Basis = RATIONAL,
            mode: str = FLOAT) -> "TrigPoly":
        """The exponential ``coeff * e_xi``; ``xi`` may be a number when dim is 1."""
        if not isinstance(xi, (tuple, list)):
            xi = (xi,)
        xi = make_freq(*xi, basis=basis) if basis.size == 1 else tuple(Fraction(v) for v in xi)
        if dim is None:
            dim = len(xi) // basis.size
        return cls({xi: coeff}, dim=dim, basis=basis, mode=mode)

    @classmethod
    def constant(cls, value, dim: int = 1, basis: Basis = RATIONAL, mode: str = FLOAT):
        return cls({(Fraction(0),) * (dim * basis.size): value}, dim, basis, mode)

    @classmethod
    def zero(cls, dim: int = 1, basis: Basis = RATIONAL, mode: str = FLOAT):
        return cls({}, dim, basis, mode)

    def like(self, terms: dict) -> "TrigPoly":
        return TrigPoly._raw(terms, self.dim, self.basis, self.mode)

    # container protocol -------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def frequencies(self) -> list:
        return sorted(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(xi) for xi in self._terms)

    def __eq__(self, other):
        if isinstance(other, TrigPoly):
            return (self.dim == other.dim and self.basis == other.basis
                    and self._terms == other._terms)
        if isinstance(other, (int, float, complex, Fraction, ExactScalar)):
            return self == TrigPoly.constant(other, self.dim, self.basis, self.mode)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.basis, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "TrigPoly(0)"
        parts = []
        for xi in self.frequencies:
            parts.append(f"{self._terms[xi]!r}*e[{','.join(str(v) for v in xi)}]")
        return "TrigPoly(" + " + ".join(parts) + ")"

    # compatibility ------------------------------------------------------
    def _check(self, other: "TrigPoly"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.basis != other.basis:
            raise DimensionError("frequency bases differ")

    def _mode_with(self, other: "TrigPoly") -> str:
        return EXACT if (self.mode == EXACT and other.mode == EXACT) else FLOAT

    def to_mode(self, mode: str) -> "TrigPoly":
        if mode == self.mode:
            return self
        return TrigPoly({xi: (complex(c) if mode == FLOAT else c) for xi, c in self._terms.items()},
                        self.dim, self.basis, mode)

    def _scalar(self, value):
        return convert(value, self.mode)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other, self.dim, self.basis, self.mode)
        self._check(other)
        mode = self._mode_with(other)
        a, b = self.to_mode(mode), other.to_mode(mode)
        out = dict(a._terms)
        for xi, c in b._terms.items():
            out[xi] = out[xi] + c if xi in out else c
        return TrigPoly._raw(out, self.dim, self.basis, mode)

    __radd__ = __add__

    def __neg__(self):
        return self.like({xi: -c for xi, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other, self.dim, self.basis, self.mode)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TrigPoly":
        c = self._scalar(c)
        return self.like({xi: c * v for xi, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TrigPoly):
            return self.scale(other)
        self._check(other)
        mode = self._mode_with(other)
        a, b = self.to_mode(mode), other.to_mode(mode)
        out: dict = {}
        for xa, ca in a._terms.items():
            for xb, cb in b._terms.items():
                xi = tuple(u + v for u, v in zip(xa, xb))
                prod = ca * cb
                out[xi] = out[xi] + prod if xi in out else prod
        return TrigPoly._raw(out, self.dim, self.basis, mode)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, TrigPoly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a non-zero constant trig polynomial")
            other = other.mean_value()
        return self.scale(1 / self._scalar(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of trig polynomials are not trig polynomials")
        out = TrigPoly.constant(1, self.dim, self.basis, self.mode)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "TrigPoly":
        return self.like({freq_neg(xi): c.conjugate() for xi, c in self._terms.items()})

    def translate(self, tau) -> "TrigPoly":
        """``f(. + tau)`` for a rational shift vector ``tau`` (exact in both modes)."""
        tau = [Fraction(t) for t in tau]
        if len(tau) != self.dim:
            raise DimensionError("shift has wrong dimension")
        out = {}
        for xi, c in self._terms.items():
            phase = sum((self.axis_value_exact(xi, i) * tau[i] for i in range(self.dim)), Fraction(0))
            out[xi] = c * _unit_root(phase, self.mode)
        return self.like(out)

    # frequency values ---------------------------------------------------
    def axis_value_exact(self, xi: tuple, axis: int) -> Fraction:
        nb = self.basis.size
        coords = xi[axis * nb:(axis + 1) * nb]
        if nb == 1:
            return coords[0]
        if any(coords[1:]):
            raise ExactModeError("irrational frequency component has no exact rational value")
        if self.basis.names[0] != "1":
            raise ExactModeError("first basis number must be 1 for exact evaluation")
        return coords[0]

    def freq_value(self, xi: tuple) -> np.ndarray:
        """Real frequency vector as floats."""
        nb = self.basis.size
        vals = self.basis.values
        arr = np.array([float(v) for v in xi]).reshape(self.dim, nb)
        return arr @ vals

    def freq_scalar(self, xi: tuple, axis: int):
        """Frequency component as a scalar of this polynomial's mode."""
        if self.mode == EXACT:
            return ExactScalar.from_number(self.axis_value_exact(xi, axis))
        return complex(self.freq_value(xi)[axis])

    def freq_matrix(self) -> np.ndarray:
        freqs = self.frequencies
        if not freqs:
            return np.zeros((0, self.dim))
        return np.array([self.freq_value(xi) for xi in freqs])

    def coeff_vector(self) -> np.ndarray:
        return np.array([complex(self._terms[xi]) for xi in self.frequencies], dtype=complex)

    # calculus -----------------------------------------------------------
    def derivative(self, alpha) -> "TrigPoly":
        alpha = tuple(alpha)
        if len(alpha) != self.dim:
            raise DimensionError("multi-index has wrong length")
        if not any(alpha):
            return self
        tpi = two_pi_i(self.mode)
        out = {}
        for xi, c in self._terms.items():
            factor = c
            for axis, k in enumerate(alpha):
                if k:
                    factor = factor * (tpi * self.freq_scalar(xi, axis)) ** k
            out[xi] = factor
        return self.like(out)

    def mean_value(self):
        return self.bohr_coeff((Fraction(0),) * (self.dim * self.basis.size))

    def bohr_coeff(self, xi) -> complex:
        xi = tuple(Fraction(v) for v in xi)
        return self._terms.get(xi, self._scalar(0))

    # evaluation ---------------------------------------------------------
    def __call__(self, x):
        """Evaluate at a point or an array of points (trailing axis = coordinates when dim > 1)."""
        x = np.asarray(x, dtype=float)
        shape = x.shape if self.dim == 1 else x.shape[:-1]
        out = self.evaluate(x).reshape(shape)
        return complex(out) if shape == () else out

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return kernels.trig_eval(self.freq_matrix(), self.coeff_vector(), pts)

    # amplitude helpers --------------------------------------------------
    def embed(self, total_dim: int, offset: int) -> "TrigPoly":
        """View as a function of ``total_dim`` variables occupying axes ``offset..``."""
        nb = self.basis.size
        out = {}
        for xi, c in self._terms.items():
            full = [Fraction(0)] * (total_dim * nb)
            full[offset * nb:(offset + self.dim) * nb] = xi
            out[tuple(full)] = c
        return TrigPoly._raw(out, total_dim, self.basis, self.mode)

    def diagonal(self) -> "TrigPoly":
        """Restrict a function of (x, y) to y = x."""
        if self.dim % 2:
            raise DimensionError("diagonal restriction needs an even number of variables")
        half = self.dim // 2 * self.basis.size
        out: dict = {}
        for xi, c in self._terms.items():
            key = freq_add(xi[:half], xi[half:])
            out[key] = out[key] + c if key in out else c
        return TrigPoly._raw(out, self.dim // 2, self.basis, self.mode)

    def swap_halves(self) -> "TrigPoly":
        """``g(x, y) -> g(y, x)``."""
        half = self.dim // 2 * self.basis.size
        return self.like({xi[half:] + xi[:half]: c for xi, c in self._terms.items()})

    def split_halves(self) -> dict:
        """Group a function of (x, y) by its y-frequency: {mu: g_mu(x)}."""
        half = self.dim // 2 * self.basis.size
        groups: dict = {}
        for xi, c in self._terms.items():
            groups.setdefault(xi[half:], {})[xi[:half]] = c
        return {mu: TrigPoly._raw(t, self.dim // 2, self.basis, self.mode)
                for mu, t in groups.items()}

    def shift(self, xi) -> "TrigPoly":
        """Multiply by ``e_xi``."""
        xi = tuple(Fraction(v) for v in xi)
        return self.like({freq_add(k, xi): c for k, c in self._terms.items()})

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for xi in self.frequencies:
            c = self._terms[xi]
            z = complex(c)
            entry = {"freq": [[str(v.numerator), str(v.denominator)] for v in xi],
                     "re": z.real, "im": z.imag}
            if self.mode == EXACT:
                entry["exact"] = exact_to_json(c)
            terms.append(entry)
        return {"dim": self.dim, "basis": list(self.basis.names), "mode": self.mode, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping, mode: str | None = None) -> "TrigPoly":
        dim = int(data["dim"])
        basis = Basis(tuple(data.get("basis", ["1"])))
        mode = mode or data.get("mode", FLOAT)
        terms = {}
        for entry in data.get("terms", []):
            xi = tuple(_parse_fraction(v) for v in entry["freq"])
            if mode == EXACT:
                c = exact_from_json(entry["exact"]) if "exact" in entry else \
                    ExactScalar.from_number((Fraction(str(entry.get("re", 0))),
                                             Fraction(str(entry.get("im", 0)))))
            else:
                c = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
            terms[xi] = terms.get(xi, 0) + c
        return cls(terms, dim, basis, mode)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _parse_fraction(v) -> Fraction:
    if isinstance(v, (list, tuple)):
        num, den = v
        return Fraction(int(num), int(den))
    return Fraction(str(v))


def exact_to_json(c) -> dict:
    c = ExactScalar.from_number(c)
    enc = lambda p: [[str(g[0]), str(g[1])] for g in p]  # noqa: E731
    return {"shift": c.shift, "num": enc(c.num), "den": enc(c.den)}


def exact_from_json(d: Mapping) -> ExactScalar:
    dec = lambda p: tuple((Fraction(a), Fraction(b)) for a, b in p)  # noqa: E731
    return ExactScalar(dec(d["num"]), dec(d["den"]), int(d["shift"]))


def _unit_root(phase: Fraction, mode: str):
    """exp(2 pi i phase) for rational phase; exact only at quarter turns."""
    frac = phase - math.floor(phase)
    quarter = {Fraction(0): 1, Fraction(1, 4): 1j, Fraction(1, 2): -1, Fraction(3, 4): -1j}
    if frac in quarter:
        return convert(quarter[frac], mode)
    if mode == EXACT:
        raise ExactModeError(f"exp(2 pi i {phase}) is not in the exact scalar field")
    return complex(np.exp(2j * np.pi * float(frac)))


def _prune(terms: dict, mode: str) -> dict:
    if mode == EXACT:
        return {xi: c for xi, c in terms.items() if not ExactScalar.from_number(c).is_zero()}
    if not terms:
        return {}
    mags = {xi: abs(c) for xi, c in terms.items()}
    top = max(mags.values())
    if top == 0:
        return {}
    cut = PRUNE_RTOL * top
    return {xi: complex(c) for xi, c in terms.items() if mags[xi] > cut}


# ---------------------------------------------------------------------------
# module-level operations


def add(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    return f + g


def mul(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    return f * g


def conj(f: TrigPoly) -> TrigPoly:
    return f.conj()


def derivative(f: TrigPoly, alpha) -> TrigPoly:
    return f.derivative(alpha)


def mean_value(f: TrigPoly):
    return f.mean_value()


def bohr_coeff(f: TrigPoly, xi):
    if not isinstance(xi, (tuple, list)):
        xi = (xi,)
    return f.bohr_coeff(xi)


def besicovitch_inner(f: TrigPoly, g: TrigPoly):
    """``M(f conj(g)) = sum_xi f_xi conj(g_xi)``."""
    f._check(g)
    mode = f._mode_with(g)
    total = convert(0, mode)
    for xi, c in f.items():
        if xi in g._terms:
            total = total + c * g._terms[xi].conjugate()
    return total


def mv_convolution(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """Mean-value convolution: coefficientwise product of the coefficient maps."""
    f._check(g)
    mode = f._mode_with(g)
    out = {xi: c * g._terms[xi] for xi, c in f.items() if xi in g._terms}
    return TrigPoly._raw(out, f.dim, f.basis, mode)


def norm(f: TrigPoly, params: NormParams) -> float:
    if not f:
        return 0.0
    radii = np.linalg.norm(f.freq_matrix(), axis=1)
    mags = np.abs(f.coeff_vector())
    w = params.weight(radii)
    if math.isinf(params.p):
        return float(np.max(w * mags))
    p = params.p
    return float(np.sum((w * mags) ** p) ** (1.0 / p))


def quasi_period(f: TrigPoly | Iterable[TrigPoly]) -> np.ndarray:
    """Per-axis window covering one period (rational frequencies) or a few slowest oscillations."""
    polys = [f] if isinstance(f, TrigPoly) else list(f)
    if not polys:
        return np.ones(1)
    dim = polys[0].dim
    out = np.ones(dim)
    for axis in range(dim):
        dens, slowest = [], math.inf
        rational = True
        for p in polys:
            nb = p.basis.size
            for xi in p._terms:
                coords = xi[axis * nb:(axis + 1) * nb]
                if nb > 1 and any(coords[1:]):
                    rational = False
                val = abs(float(p.freq_value(xi)[axis]))
                if val > 0:
                    slowest = min(slowest, val)
                if coords[0]:
                    dens.append(coords[0].denominator)
        if rational:
            out[axis] = float(reduce(math.lcm, dens, 1))
        else:
            out[axis] = 4.0 / slowest if math.isfinite(slowest) else 1.0
    return out


def uniform_grid(period: np.ndarray, points_per_axis: int) -> np.ndarray:
    axes = [np.arange(points_per_axis) * (L / points_per_axis) for L in period]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class SeminormBounds:
    lower: float
    upper: float
    lower_alpha: tuple
    upper_alpha: tuple


def multi_indices(dim: int, max_order: int, min_order: int = 0):
    """All multi-indices with ``min_order <= |alpha| <= max_order``, graded."""
    out = []

    def rec(prefix, left, axes):
        if axes == 1:
            yield prefix + (left,)
            return
        for k in range(left, -1, -1):
            yield from rec(prefix + (k,), left - k, axes - 1)

    for order in range(min_order, max_order + 1):
        out.extend(rec((), order, dim))
    return out


def multi_factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def gevrey_seminorm_lb(f: TrigPoly, s: float, C: float, N_max: int,
                       grid: np.ndarray | int = 64) -> SeminormBounds:
    """Bracket ``||f||_{s,C}`` truncated to ``|alpha| <= N_max``.

    ``lower`` maximises ``C^-|alpha| (alpha!)^-s |d^alpha f(x)|`` over the grid;
    ``upper`` uses the l^1 coefficient norm of each derivative, which bounds
    its supremum over all x.
    """
    if C <= 0 or s < 1:
        raise ValueError("need C > 0 and s >= 1")
    if isinstance(grid, (int, np.integer)):
        grid = uniform_grid(quasi_period(f), int(grid))
    pts = np.asarray(grid, dtype=float).reshape(-1, f.dim)
    fl = f.to_mode(FLOAT)
    lower, upper = 0.0, 0.0
    la = ua = (0,) * f.dim
    for alpha in multi_indices(f.dim, N_max):
        weight = C ** (-sum(alpha)) * multi_factorial(alpha) ** (-s)
        d = fl.derivative(alpha)
        lo = weight * float(np.max(np.abs(d.evaluate(pts)))) if d else 0.0
        up = weight * norm(d, NormParams(p=1))
        if lo > lower:
            lower, la = lo, alpha
        if up > upper:
            upper, ua = up, alpha
    return SeminormBounds(lower, upper, la, ua)
