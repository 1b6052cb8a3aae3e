"""Exact arithmetic in real quadratic fields and periodic continued fractions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .errors import FieldMismatchError, RationalInputError

Rational = Union[int, Fraction]

_TRIAL_LIMIT = 1000


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (f, d) with n = f**2 * d and d square-free."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    f, d = 1, 1
    m = n
    p = 2
    while p < _TRIAL_LIMIT and p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    if m == 1:
        return f, d
    r = math.isqrt(m)
    if r * r == m:
        return f * r, d
    if m < _TRIAL_LIMIT ** 2:
        # no prime below the limit divides m, so m is prime
        return f, d * m
    from sympy import factorint

    for p, e in factorint(m).items():
        f *= p ** (e // 2)
        if e % 2:
            d *= p
    return f, d


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@total_ordering
class QuadNumber:
    """The number a + b*sqrt(D) with rational a, b and square-free D > 1.

    Rationals (b == 0) carry ``D = 1`` and mix freely with any field.
    """

    __slots__ = ("_a", "_b", "_D")

    def __init__(self, a: Rational = 0, b: Rational = 0, D: int = 1) -> None:
        a, b = _frac(a), _frac(b)
        D = int(D)
        if D <= 0:
            raise ValueError("D must be positive")
        f, d = _squarefree_split(D)
        b *= f
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        self._a, self._b, self._D = a, b, d

    # ----------------------------------------------------------------- access
    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def D(self) -> int:
        return self._D

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    @classmethod
    def sqrt(cls, D: int) -> QuadNumber:
        return cls(0, 1, D)

    @classmethod
    def coerce(cls, x) -> QuadNumber:
        if isinstance(x, QuadNumber):
            return x
        return cls(_frac(x))

    def _common(self, other: QuadNumber) -> int:
        if self._D == other._D or other._D == 1:
            return self._D
        if self._D == 1:
            return other._D
        raise FieldMismatchError(f"Q(sqrt({self._D})) vs Q(sqrt({other._D}))")

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other):
        try:
            o = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._common(o)
        return QuadNumber(self._a + o._a, self._b + o._b, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self._a, -self._b, self._D)

    def __sub__(self, other):
        try:
            o = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._common(o)
        a = self._a * o._a + self._b * o._b * D
        b = self._a * o._b + self._b * o._a
        return QuadNumber(a, b, D)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self._a * self._a - self._D * self._b * self._b

    def conj(self) -> QuadNumber:
        return QuadNumber(self._a, -self._b, self._D)

    def inv(self) -> QuadNumber:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        return QuadNumber(self._a / n, -self._b / n, self._D)

    def __truediv__(self, other):
        try:
            o = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return QuadNumber.coerce(other) * self.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = QuadNumber(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # ------------------------------------------------------------- comparison
    def sign(self) -> int:
        """Exact sign of a + b*sqrt(D)."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with D b^2
        lhs = self._a * self._a
        rhs = self._D * self._b * self._b
        return sa if lhs > rhs else sb

    def __eq__(self, other):
        try:
            o = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self._a == o._a and self._b == o._b and (self._b == 0 or self._D == o._D)

    def __lt__(self, other):
        try:
            o = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self):
        return hash((self._a, self._b, self._D if self._b else 1))

    def floor(self) -> int:
        """Exact floor."""
        if self._b == 0:
            return math.floor(self._a)
        # x = (A + B sqrt D) / C with C > 0
        C = math.lcm(self._a.denominator, self._b.denominator)
        A = int(self._a * C)
        B = int(self._b * C)
        s = math.isqrt(B * B * self._D)
        if B > 0:
            return (A + s) // C
        return (A - s - 1) // C

    def __floor__(self):
        return self.floor()

    def __float__(self) -> float:
        if self._b == 0:
            return float(self._a)
        # floor(x * 2^k) is exact; Fraction -> float rounds correctly
        approx = abs(float(self._a)) + abs(float(self._b)) * math.sqrt(self._D)
        e = math.frexp(approx)[1] if approx > 0 else 0
        k = max(0, 120 - e)
        while True:
            scaled = (self * (1 << k)).floor()
            # cancellation between a and b*sqrt(D) leaves few bits; rescale
            if abs(scaled).bit_length() >= 110:
                return float(Fraction(scaled, 1 << k))
            k += 120 - abs(scaled).bit_length()

    def to_float(self) -> float:
        return float(self)

    # ------------------------------------------------------------------ misc
    def __repr__(self) -> str:
        return f"QuadNumber({self._a}, {self._b}, {self._D})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        sgn = "+" if self._b > 0 else "-"
        return f"{self._a}{sgn}{abs(self._b)}*sqrt({self._D})"

    def to_json(self) -> dict:
        return {"D": self._D, "a": f"{self._a.numerator}/{self._a.denominator}",
                "b": f"{self._b.numerator}/{self._b.denominator}"}

    @classmethod
    def from_json(cls, obj: dict) -> QuadNumber:
        return cls(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["D"]))


def field_arith(x, y, op: str):
    """Dispatch table over the field operations; ``y`` is ignored for unary ops."""
    x = QuadNumber.coerce(x)
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inv()
    if op == "conj":
        return x.conj()
    if op == "to_float":
        return float(x)
    if op == "cmp":
        return (x - QuadNumber.coerce(y)).sign()
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------
# continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        if any(a <= 0 for a in self.period) or any(a <= 0 for a in self.preperiod[1:]):
            raise ValueError("partial quotients after the first must be positive")

    def value(self) -> QuadNumber:
        """Exact value, from the purely periodic tail's fixed-point equation."""
        P = _period_matrix(self.period)
        # y = (P00 y + P01) / (P10 y + P11)  =>  P10 y^2 + (P11 - P00) y - P01 = 0
        a, b, c = P[1][0], P[1][1] - P[0][0], -P[0][1]
        disc = b * b - 4 * a * c
        y = QuadNumber(Fraction(-b, 2 * a), Fraction(1, 2 * a), disc)  # larger root, y > 1
        x = y
        for a_i in reversed(self.preperiod):
            x = a_i + x.inv()
        return x


def _period_matrix(terms) -> list[list[int]]:
    m = [[1, 0], [0, 1]]
    for a in terms:
        m = [[m[0][0] * a + m[0][1], m[0][0]], [m[1][0] * a + m[1][1], m[1][0]]]
    return m


def cf_expand(alpha, max_terms: int = 100_000) -> ContinuedFraction:
    """Exact eventually periodic continued fraction of a real quadratic irrational."""
    x = QuadNumber.coerce(alpha)
    if x.is_rational:
        raise RationalInputError(f"{x} is rational")
    seen: dict[QuadNumber, int] = {}
    terms: list[int] = []
    while x not in seen:
        if len(terms) > max_terms:
            raise RuntimeError(f"period longer than {max_terms} terms")  # grows like sqrt(disc)
        seen[x] = len(terms)
        a = x.floor()
        terms.append(a)
        x = (x - a).inv()
    start = seen[x]
    return ContinuedFraction(tuple(terms[:start]), tuple(terms[start:]))


def cf_to_hyperbolic(cf: ContinuedFraction) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer matrix W P W^-1 fixing the value of ``cf``; det is +-1."""
    W = _period_matrix(cf.preperiod)
    P = _period_matrix(cf.period)
    detW = W[0][0] * W[1][1] - W[0][1] * W[1][0]
    Winv = [[W[1][1] * detW, -W[0][1] * detW], [-W[1][0] * detW, W[0][0] * detW]]
    M = _matmul(_matmul(W, P), Winv)
    return ((M[0][0], M[0][1]), (M[1][0], M[1][1]))


def _matmul(A, B):
    return [
        [A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
        [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]],
    ]


def parse_quadratic(text: str) -> QuadNumber:
    """Parse the short forms used on the command line.

    Accepts ``golden``, ``sqrt2``, ``sqrt(D)``, ``a+b*sqrt(D)`` with rational a, b,
    and JSON-style ``D:a:b`` triples.
    """
    t = text.strip().replace(" ", "")
    named = {"golden": QuadNumber(Fraction(1, 2), Fraction(1, 2), 5)}
    if t in named:
        return named[t]
    if t.startswith("sqrt") and t[4:].isdigit():
        return QuadNumber.sqrt(int(t[4:]))
    if t.count(":") == 2:
        D, a, b = t.split(":")
        return QuadNumber(Fraction(a), Fraction(b), int(D))
    if "sqrt(" in t:
        head, _, rest = t.partition("sqrt(")
        D = int(rest.rstrip(")"))
        head = head.rstrip("*")
        # split head into a and b at the last sign that is not leading
        idx = max(head.rfind("+"), head.rfind("-"))
        if idx > 0:
            a, b = head[:idx], head[idx:]
        else:
            a, b = "0", head
        if b in ("", "+"):
            b = "1"
        elif b == "-":
            b = "-1"
        return QuadNumber(Fraction(a), Fraction(b), D)
    return QuadNumber(Fraction(t))
