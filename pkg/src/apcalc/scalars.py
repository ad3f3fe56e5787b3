"""Exact scalars for oracle computations.

Coefficients produced by differentiating trigonometric polynomials pick up
factors of ``2*pi*i``.  To keep exact mode exact we work in the field
Q(i)(pi) of rational functions in pi with Gaussian-rational coefficients.
Since pi is transcendental, equality in this field is decided exactly.

Float mode uses plain Python ``complex`` values; the helpers at the bottom
of this module dispatch on the scalar type so the rest of the package can
stay agnostic.
"""

from __future__ import annotations

from fractions import Fraction
import math
import numbers

ZERO = Fraction(0)
ONE = Fraction(1)

# Gaussian rationals are (re, im) tuples of Fractions; polynomials in pi are
# tuples of Gaussian rationals, lowest degree first, without trailing zeros.


def _g(re, im=0):
    return (Fraction(re), Fraction(im))


def _gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _gsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gdiv(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    if n == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def _gzero(a):
    return a[0] == 0 and a[1] == 0


_G0 = (ZERO, ZERO)
_G1 = (ONE, ZERO)


def _trim(p):
    p = list(p)
    while p and _gzero(p[-1]):
        p.pop()
    return tuple(p)


def _padd(p, q):
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else _G0
        b = q[k] if k < len(q) else _G0
        out.append(_gadd(a, b))
    return _trim(out)


def _pneg(p):
    return tuple((-c[0], -c[1]) for c in p)


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [_G0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if _gzero(a):
            continue
        for j, b in enumerate(q):
            out[i + j] = _gadd(out[i + j], _gmul(a, b))
    return _trim(out)


def _pscale(p, c):
    return _trim(_gmul(a, c) for a in p)


def _pdivmod(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    quot = [_G0] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(p) >= len(q) and p:
        c = _gdiv(p[-1], lead)
        shift = len(p) - len(q)
        quot[shift] = c
        for k, b in enumerate(q):
            p[shift + k] = _gsub(p[shift + k], _gmul(c, b))
        p = list(_trim(p))
    return _trim(quot), tuple(p)


def _pmonic(p):
    if not p:
        return p
    return _pscale(p, _gdiv(_G1, p[-1]))


def _pgcd(p, q):
    while q:
        _, r = _pdivmod(p, q)
        p, q = q, r
    return _pmonic(p)


def _split_shift(p):
    """Strip the pi-power content: p = pi**k * q with q(0) != 0."""
    k = 0
    while k < len(p) and _gzero(p[k]):
        k += 1
    return k, tuple(p[k:])


class ExactScalar:
    """Element of Q(i)(pi) kept in lowest terms.

    The value is ``pi**shift * num(pi) / den(pi)`` where ``num`` and ``den``
    have non-zero constant terms, are coprime, and ``den`` is monic.
    """

    __slots__ = ("shift", "num", "den", "_hash")

    def __init__(self, num=(), den=(_G1,), shift=0, _normalized=False):
        if _normalized:
            self.shift, self.num, self.den = shift, num, den
            self._hash = None
            return
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.shift, self.num, self.den = 0, (), (_G1,)
            self._hash = None
            return
        kn, num = _split_shift(num)
        kd, den = _split_shift(den)
        shift += kn - kd
        if len(den) > 1:
            g = _pgcd(num, den)
            if len(g) > 1:
                num, _ = _pdivmod(num, g)
                den, _ = _pdivmod(den, g)
        lead = den[-1]
        if lead != _G1:
            inv = _gdiv(_G1, lead)
            num = _pscale(num, inv)
            den = _pscale(den, inv)
        self.shift, self.num, self.den = shift, num, den
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def from_number(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, complex):
            return cls(((Fraction(value.real), Fraction(value.imag)),))
        if isinstance(value, (numbers.Rational, int)):
            return cls(((Fraction(value), ZERO),))
        if isinstance(value, float):
            return cls(((Fraction(value), ZERO),))
        if isinstance(value, tuple) and len(value) == 2:
            return cls(((Fraction(value[0]), Fraction(value[1])),))
        raise TypeError(f"cannot convert {value!r} to ExactScalar")

    @classmethod
    def pi_power(cls, k: int, coeff=(1, 0)) -> "ExactScalar":
        return cls((_g(*coeff),), shift=k)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction, complex, float)):
            return ExactScalar.from_number(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        k = min(self.shift, other.shift)
        a = ((_G0,) * (self.shift - k)) + self.num
        b = ((_G0,) * (other.shift - k)) + other.num
        if self.den == other.den:
            return ExactScalar(_padd(a, b), self.den, k)
        return ExactScalar(_padd(_pmul(a, other.den), _pmul(b, self.den)),
                           _pmul(self.den, other.den), k)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(_pneg(self.num), self.den, self.shift, _normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return ExactScalar()
        if len(self.den) == 1 and len(other.den) == 1:
            # both Laurent polynomials in pi: the product stays reduced
            num = _pmul(self.num, other.num)
            return ExactScalar(num, (_G1,), self.shift + other.shift, _normalized=True)
        return ExactScalar(_pmul(self.num, other.num), _pmul(self.den, other.den),
                           self.shift + other.shift)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return ExactScalar(self.den, self.num, -self.shift)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("ExactScalar only supports integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        out = ExactScalar.from_number(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        # pi is real, so conjugation acts on the coefficients only
        num = tuple((c[0], -c[1]) for c in self.num)
        den = tuple((c[0], -c[1]) for c in self.den)
        return ExactScalar(num, den, self.shift, _normalized=True)

    # comparisons --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, complex, float)):
            other = ExactScalar.from_number(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return (self.num == other.num and self.den == other.den
                and (not self.num or self.shift == other.shift))

    def __hash__(self):
        if self._hash is None:
            if not self.num:
                self._hash = hash(0)
            elif self.shift == 0 and len(self.den) == 1 and len(self.num) == 1:
                c = self.num[0]
                self._hash = hash(complex(c[0], c[1]) if c[1] else c[0])
            else:
                self._hash = hash((self.shift, self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def __complex__(self):
        if not self.num:
            return 0j

        def ev(p):
            acc = 0j
            for c in reversed(p):
                acc = acc * math.pi + complex(float(c[0]), float(c[1]))
            return acc

        return ev(self.num) / ev(self.den) * math.pi ** self.shift

    def __abs__(self):
        return abs(complex(self))

    @property
    def real(self):
        return complex(self).real

    @property
    def imag(self):
        return complex(self).imag

    def __repr__(self):
        def fmt(p):
            parts = []
            for k, c in enumerate(p):
                if _gzero(c):
                    continue
                cs = f"({c[0]}{'+' if c[1] >= 0 else '-'}{abs(c[1])}i)" if c[1] else f"{c[0]}"
                parts.append(cs + (f"*pi^{k}" if k else ""))
            return " + ".join(parts) or "0"

        if not self.num:
            return "ExactScalar(0)"
        s = fmt(self.num)
        if len(self.den) > 1:
            s = f"({s})/({fmt(self.den)})"
        if self.shift:
            s = f"pi^{self.shift}*({s})"
        return f"ExactScalar({s})"


# mode helpers -----------------------------------------------------------

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

_TWO_PI_I_EXACT = ExactScalar.pi_power(1, (0, 2))


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def two_pi_i(mode: str):
    return _TWO_PI_I_EXACT if mode == EXACT else 2j * math.pi


def pi(mode: str):
    return ExactScalar.pi_power(1) if mode == EXACT else math.pi


def convert(value, mode: str):
    """Bring a number into the scalar type used by ``mode``."""
    if mode == EXACT:
        return ExactScalar.from_number(value)
    return complex(value)


def one(mode: str):
    return convert(1, mode)


def zero(mode: str):
    return convert(0, mode)


def is_exact(value) -> bool:
    return isinstance(value, (ExactScalar, Fraction, int))


def conj(value):
    return value.conjugate()


def as_complex(value) -> complex:
    return complex(value)
