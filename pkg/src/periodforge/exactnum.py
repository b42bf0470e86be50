"""Exact arithmetic in a real quadratic field Q(sqrt(d)).

Values are ``p + q*sqrt(d)`` with ``p, q`` rationals.  A value with ``q == 0``
is a plain rational and carries ``d == 0``; this keeps equality structural.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

__all__ = [
    "FieldError",
    "QScalar",
    "QVec2",
    "ZERO",
    "ONE",
    "sign",
    "det2",
    "cross",
    "dot",
    "squarefree_part",
    "egcd",
    "bezout",
    "rank_q",
    "integer_column_reduce",
    "integer_kernel",
    "lcm_denominator",
]


class FieldError(ArithmeticError):
    """Raised for mixed fields, division by zero and malformed literals."""


def _is_squarefree(d: int) -> bool:
    if d < 0:
        return False
    if d in (0, 1):
        return True
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == f*f*s`` and ``s`` square-free."""
    if n < 0:
        raise FieldError("negative radicand")
    if n == 0:
        return 0, 0
    s, f, k = n, 1, 2
    while k * k <= s:
        while s % (k * k) == 0:
            s //= k * k
            f *= k
        k += 1
    return s, f


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {type(x).__name__}")


class QScalar:
    """An exact element ``p + q*sqrt(d)`` of a real quadratic field."""

    __slots__ = ("p", "q", "d")

    def __init__(self, p=0, q=0, d: int = 0):
        p = _frac(p)
        q = _frac(q)
        d = int(d)
        if not _is_squarefree(d):
            raise FieldError(f"d={d} is not a square-free nonnegative integer")
        if d == 1:
            p, q = p + q, Fraction(0)
        if d == 0 or q == 0:
            q, d = Fraction(0), 0
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)

    def __setattr__(self, key, value):
        raise AttributeError("QScalar is immutable")

    @classmethod
    def _raw(cls, p: Fraction, q: Fraction, d: int) -> "QScalar":
        # trusted constructor: p, q Fractions, d already canonical for q
        obj = object.__new__(cls)
        if q == 0:
            d = 0
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "q", q if d else Fraction(0))
        object.__setattr__(obj, "d", d)
        return obj

    @classmethod
    def sqrt(cls, n: int) -> "QScalar":
        """``sqrt(n)`` for a nonnegative integer ``n``."""
        s, f = squarefree_part(n)
        if s in (0, 1):
            return cls(f * s)
        return cls(0, f, s)

    @staticmethod
    def coerce(x) -> "QScalar":
        if isinstance(x, QScalar):
            return x
        return QScalar(x)

    # -- field plumbing -------------------------------------------------
    def is_rational(self) -> bool:
        return self.q == 0

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def conjugate(self) -> "QScalar":
        return QScalar._raw(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.d

    def _common(self, other: "QScalar") -> int:
        if self.d == other.d or other.d == 0:
            return self.d
        if self.d == 0:
            return other.d
        raise FieldError(f"mixing Q(sqrt({self.d})) with Q(sqrt({other.d}))")

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                return QScalar._raw(self.p + other, self.q, self.d)
            return NotImplemented
        d = self._common(other)
        return QScalar._raw(self.p + other.p, self.q + other.q, d)

    __radd__ = __add__

    def __neg__(self):
        return QScalar._raw(-self.p, -self.q, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                return QScalar._raw(self.p - other, self.q, self.d)
            return NotImplemented
        d = self._common(other)
        return QScalar._raw(self.p - other.p, self.q - other.q, d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                return QScalar._raw(self.p * other, self.q * other, self.d)
            return NotImplemented
        d = self._common(other)
        if d == 0:
            return QScalar._raw(self.p * other.p, Fraction(0), 0)
        p = self.p * other.p + self.q * other.q * d
        q = self.p * other.q + self.q * other.p
        return QScalar._raw(p, q, d)

    __rmul__ = __mul__

    def inverse(self) -> "QScalar":
        if self.is_zero():
            raise FieldError("division by zero in Q(sqrt(d))")
        if self.q == 0:
            return QScalar._raw(1 / self.p, Fraction(0), 0)
        n = self.norm()
        return QScalar._raw(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                if other == 0:
                    raise FieldError("division by zero in Q(sqrt(d))")
                return QScalar._raw(self.p / other, self.q / other, self.d)
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order ----------------------------------------------------------
    def sign(self) -> int:
        return sign(self)

    def __eq__(self, other):
        if isinstance(other, QScalar):
            return self.p == other.p and self.q == other.q and self.d == other.d
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def _cmp(self, other) -> int:
        return sign(self - QScalar.coerce(other))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __bool__(self):
        return not self.is_zero()

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def floor(self) -> int:
        """Exact floor."""
        if self.q == 0:
            return math.floor(self.p)
        # q*sqrt(d) = sign(q) * sqrt(q^2 d); bracket it with integer square roots
        scale = 1 << 64
        num = self.q.numerator * self.q.numerator * self.d
        den = self.q.denominator
        root = isqrt(num * scale * scale)
        approx = Fraction(root, den * scale)
        if self.q < 0:
            approx = -approx
        guess = math.floor(self.p + approx)
        while self < guess:
            guess -= 1
        while self >= guess + 1:
            guess += 1
        return guess

    def ceil(self) -> int:
        return -((-self).floor())

    # -- text -----------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"QScalar({format_scalar(self)!r})"


ZERO = QScalar(0)
ONE = QScalar(1)


def sign(s: QScalar) -> int:
    """Exact sign of ``p + q*sqrt(d)``."""
    p, q = s.p, s.q
    if q == 0:
        return (p > 0) - (p < 0)
    sq = 1 if q > 0 else -1
    if p == 0:
        return sq
    sp = 1 if p > 0 else -1
    if sp == sq:
        return sp
    # opposite signs: the larger of p^2 and q^2 d wins
    lhs, rhs = p * p, q * q * s.d
    if lhs > rhs:
        return sp
    if lhs < rhs:
        return sq
    return 0


# -- serialization ----------------------------------------------------------

def _fmt_frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def format_scalar(s: QScalar) -> str:
    """Canonical text: ``p/q`` or ``p/q+r/s*sqrt(d)`` (sign folded into r)."""
    head = _fmt_frac(s.p)
    if s.q == 0:
        return head
    op = "+" if s.q > 0 else "-"
    return f"{head}{op}{_fmt_frac(abs(s.q))}*sqrt({s.d})"


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?:(?P<p>{_RAT})\s*)?"
    rf"(?:(?P<op>[+-])?\s*(?:(?P<q>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<d>\d+)\s*\))?\s*$"
)


def parse_scalar(text: str) -> QScalar:
    """Parse the canonical form plus lenient variants (``3``, ``-sqrt(2)``)."""
    if not isinstance(text, str):
        if isinstance(text, (int, Fraction)):
            return QScalar(text)
        raise FieldError(f"expected a string literal, got {type(text).__name__}")
    m = _SCALAR_RE.match(text)
    if not m or (m.group("p") is None and m.group("d") is None):
        raise FieldError(f"malformed scalar literal {text!r}")
    if any(g and "/" in g and int(g.split("/")[1]) == 0 for g in (m.group("p"), m.group("q"))):
        raise FieldError(f"zero denominator in {text!r}")
    p = Fraction(m.group("p")) if m.group("p") else Fraction(0)
    if m.group("d") is None:
        return QScalar(p)
    q = Fraction(m.group("q")) if m.group("q") else Fraction(1)
    if m.group("op") == "-":
        q = -q
    elif m.group("op") is None and m.group("p") is not None:
        raise FieldError(f"malformed scalar literal {text!r}")
    d = int(m.group("d"))
    if not _is_squarefree(d):
        raise FieldError(f"sqrt({d}): radicand must be square-free")
    return QScalar(p, q, d)


class QVec2:
    """A pair of ``QScalar`` (a point or a vector in the plane)."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", QScalar.coerce(x))
        object.__setattr__(self, "y", QScalar.coerce(y))

    def __setattr__(self, key, value):
        raise AttributeError("QVec2 is immutable")

    def __add__(self, other: "QVec2") -> "QVec2":
        return QVec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "QVec2") -> "QVec2":
        return QVec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "QVec2":
        return QVec2(-self.x, -self.y)

    def __mul__(self, k) -> "QVec2":
        return QVec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "QVec2":
        return QVec2(self.x / k, self.y / k)

    def __eq__(self, other):
        if not isinstance(other, QVec2):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero()

    def __repr__(self):
        return f"QVec2({self.x}, {self.y})"


def det2(a: QVec2, b: QVec2) -> QScalar:
    return a.x * b.y - a.y * b.x


cross = det2


def dot(a: QVec2, b: QVec2) -> QScalar:
    return a.x * b.x + a.y * b.y


# -- linear algebra over Q and Z ---------------------------------------------

def rank_q(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix by fraction-exact Gaussian elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    rank, ncols = 0, len(m[0])
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / pr[col]
                m[i] = [a - f * b for a, b in zip(m[i], pr)]
        rank += 1
        if rank == len(m):
            break
    return rank


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``.

    Among Bezout pairs the one with minimal ``|x|`` is returned, ties broken
    toward ``x >= 0``; ``gcd(0, x) == |x|``.
    """
    if a == 0 and b == 0:
        return 0, 0, 0
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    g, x, y = old_r, old_s, old_t
    if b != 0:
        # canonicalize: x ranges over x0 + k*(b/g); pick minimal |x|
        step = abs(b // g)
        x_mod = x % step
        cands = [x_mod, x_mod - step]
        x_new = min(cands, key=lambda c: (abs(c), c < 0))
        y = (g - a * x_new) // b
        x = x_new
    assert a * x + b * y == g
    return g, x, y


def bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """``(g, coeffs)`` with ``sum(c*v) == g == gcd(values)``."""
    g, coeffs = 0, [0] * len(values)
    for i, v in enumerate(values):
        g2, x, y = egcd(g, v)
        coeffs = [c * x for c in coeffs]
        coeffs[i] = y
        g = g2
    return g, coeffs


def integer_column_reduce(mat: Sequence[Sequence[int]]):
    """Column-style echelon form over Z.

    Returns ``(H, U, r)`` with ``H == mat * U``, ``U`` unimodular, the first
    ``r`` columns of ``H`` in echelon form and the remaining columns zero.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    H = [list(map(int, r)) for r in mat]
    U = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a*col_i + c*col_j, b*col_i + d*col_j)
        for M in (H, U):
            for r in M:
                xi, xj = r[i], r[j]
                r[i], r[j] = a * xi + c * xj, b * xi + d * xj

    piv_col = 0
    for row in range(rows):
        if piv_col >= cols:
            break
        for j in range(piv_col + 1, cols):
            a, b = H[row][piv_col], H[row][j]
            if b == 0:
                continue
            g, x, y = egcd(a, b)
            # [[x, -b/g], [y, a/g]] has determinant 1
            colop(piv_col, j, x, -b // g, y, a // g)
        if H[row][piv_col] != 0:
            if H[row][piv_col] < 0:
                for M in (H, U):
                    for r in M:
                        r[piv_col] = -r[piv_col]
            piv_col += 1
    return H, U, piv_col


def integer_kernel(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    """A Z-basis (as column vectors) of ``{z in Z^m : mat @ z == 0}``."""
    _, U, r = integer_column_reduce(mat)
    cols = len(U)
    return [[U[i][j] for i in range(cols)] for j in range(r, cols)]


def lcm_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        den = Fraction(v).denominator
        out = out * den // gcd(out, den)
    return out
