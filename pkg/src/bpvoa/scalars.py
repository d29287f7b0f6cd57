"""Exact arithmetic in the field Q(k) of rational functions in the level.

Polynomials are tuples of :class:`fractions.Fraction` coefficients, lowest
degree first, with no trailing zeros (the zero polynomial is ``()``).
A :class:`Scalar` is a reduced quotient of two such polynomials whose
denominator is monic, so equal scalars are structurally equal and hash alike.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm

__all__ = [
    "K",
    "PoleError",
    "Scalar",
    "as_scalar",
    "format_rational",
    "format_scalar",
    "parse_rational",
    "parse_scalar",
    "specialize",
]

Poly = tuple  # tuple[Fraction, ...]

_ONE: Poly = (Fraction(1),)


class PoleError(ZeroDivisionError):
    """Raised when a scalar is evaluated at a root of its denominator."""


# -- polynomial helpers -------------------------------------------------------


def _trim(c: list) -> Poly:
    while c and not c[-1]:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    if len(a) == 1:
        c = a[0]
        return tuple(c * x for x in b)
    if len(b) == 1:
        c = b[0]
        return tuple(x * c for x in a)
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a: Poly, c) -> Poly:
    if not c:
        return ()
    return tuple(x * c for x in a)


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    rem = list(a)
    lead = b[-1]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for shift in range(len(a) - len(b), -1, -1):
        c = rem[shift + len(b) - 1] / lead
        q[shift] = c
        if c:
            for i, y in enumerate(b):
                rem[shift + i] -= c * y
    return _trim(q), _trim(rem[: len(b) - 1])


def _pmonic(a: Poly) -> Poly:
    lead = a[-1]
    if lead == 1:
        return a
    return tuple(x / lead for x in a)


def _pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a) if a else _ONE


def _peval(a: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


# -- Scalar -------------------------------------------------------------------


class Scalar:
    """An element of Q(k) in canonical form (reduced, monic denominator)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=_ONE, *, _normalized: bool = False):
        if isinstance(num, (int, Fraction)):
            num = (Fraction(num),) if num else ()
        if not _normalized:
            num, den = _normalize(tuple(Fraction(x) for x in num), tuple(Fraction(x) for x in den))
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> Scalar:
        return cls(num, den, _normalized=True)

    @classmethod
    def _make(cls, num: Poly, den: Poly) -> Scalar:
        return cls(*_normalize(num, den), _normalized=True)

    # predicates and conversions

    def is_constant(self) -> bool:
        return self.den == _ONE and len(self.num) <= 1

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} depends on k")
        return self.num[0] if self.num else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            if self.den != _ONE or len(self.num) > 1:
                return False
            return (self.num[0] if self.num else 0) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant())
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    # arithmetic

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            if self.den == _ONE:
                return Scalar._raw(_padd(self.num, (Fraction(other),)), _ONE)
            other = Scalar(other)
        elif not isinstance(other, Scalar):
            return NotImplemented
        if self.den == other.den:
            num = _padd(self.num, other.num)
            if self.den == _ONE:
                return Scalar._raw(num, _ONE)
            return Scalar._make(num, self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return Scalar._make(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar._raw(_pneg(self.num), self.den)

    def __pos__(self) -> Scalar:
        return self

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Scalar._raw((), _ONE)
            return Scalar._raw(_pscale(self.num, Fraction(other)), self.den)
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.den == _ONE and other.den == _ONE:
            return Scalar._raw(_pmul(self.num, other.num), _ONE)
        return Scalar._make(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not self.num:
            raise ZeroDivisionError("division by the zero scalar")
        return Scalar._make(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return Scalar._raw(_pscale(self.num, 1 / Fraction(other)), self.den)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int) -> Scalar:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out = Scalar(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __call__(self, k0) -> Fraction:
        return specialize(self, k0)

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    num = _trim(list(num))
    den = _trim(list(den))
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return (), _ONE
    if len(den) > 1:
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
    lead = den[-1]
    if lead != 1:
        num = tuple(x / lead for x in num)
        den = tuple(x / lead for x in den)
    return num, den


K = Scalar._raw((Fraction(0), Fraction(1)), _ONE)
"""The level parameter k as an element of Q(k)."""


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Scalar")


def specialize(a, k0) -> Fraction:
    """Evaluate ``a`` at the rational level ``k0``; raise PoleError at a pole."""
    k0 = Fraction(k0)
    if isinstance(a, (int, Fraction)):
        return Fraction(a)
    d = _peval(a.den, k0)
    if not d:
        raise PoleError(f"{format_scalar(a)} has a pole at k = {format_rational(k0)}")
    return _peval(a.num, k0) / d


# -- serialization --------------------------------------------------------------


def _int_poly_str(coeffs: list[int]) -> str:
    parts = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = "k" if e == 1 else f"k^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    s = "".join(f"{sg}{b}" for sg, b in parts)
    return s[1:] if s[0] == "+" else s


def format_scalar(a) -> str:
    """Render as ``"(<num>)/(<den>)"`` with coprime integer-coefficient polynomials."""
    a = as_scalar(a)
    coeffs = a.num + a.den
    scale = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    num = [int(c * scale) for c in a.num]
    den = [int(c * scale) for c in a.den]
    content = 0
    for c in num + den:
        content = gcd(content, c)
    if content > 1:
        num = [c // content for c in num]
        den = [c // content for c in den]
    return f"({_int_poly_str(num)})/({_int_poly_str(den)})"


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?
        (?P<var>k(?:\s*\^\s*(?P<exp>\d+))?)?\s*""",
    re.VERBOSE,
)


def _parse_poly(s: str) -> Poly:
    s = s.strip()
    if not s:
        raise ValueError("empty polynomial")
    pos = 0
    out: dict[int, Fraction] = {}
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {s!r}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing operator in {s!r}")
        if m.group("coef") is None and m.group("var") is None:
            raise ValueError(f"dangling sign in {s!r}")
        if m.group("star") and m.group("var") is None:
            raise ValueError(f"dangling '*' in {s!r}")
        c = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sign") == "-":
            c = -c
        e = 0
        if m.group("var"):
            e = int(m.group("exp")) if m.group("exp") else 1
        out[e] = out.get(e, Fraction(0)) + c
        pos = m.end()
        first = False
    deg = max(out)
    return _trim([out.get(i, Fraction(0)) for i in range(deg + 1)])


_QUOTIENT = re.compile(r"^\s*\((?P<num>[^()]*)\)\s*/\s*\((?P<den>[^()]*)\)\s*$")


def parse_scalar(s: str) -> Scalar:
    """Inverse of :func:`format_scalar`; also accepts a bare polynomial or ``a/b``."""
    m = _QUOTIENT.match(s)
    if m:
        num, den = _parse_poly(m.group("num")), _parse_poly(m.group("den"))
    else:
        num, den = _parse_poly(s), _ONE
    if not den:
        raise ZeroDivisionError(f"zero denominator in {s!r}")
    return Scalar(num, den)


def parse_rational(s: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` exactly; floats are rejected."""
    if not re.fullmatch(r"\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*", s):
        raise ValueError(f"not an exact rational: {s!r}")
    return Fraction(s.replace(" ", ""))
