"""Exact scalar types used by the form engine.

Coefficients are ``Fraction`` for rational work, ``Quad`` for elements of a
quadratic extension Q(sqrt d) (d = 2 for the real examples, d = -1 for Gaussian
rationals) and ``Dual`` for first-order linearisation.  Float mode simply uses
Python/numpy floats.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

FLOAT_TOL = 1e-9


class NotExact(ArithmeticError):
    """Raised when an exact operation leaves the supported fields."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


class Quad:
    """a + b*sqrt(d) with rational a, b and a fixed non-square integer d."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 2):
        self.a = _frac(a)
        self.b = _frac(b)
        self.d = d

    # coercion -------------------------------------------------------------
    def _co(self, other):
        if isinstance(other, Quad):
            if other.d != self.d:
                raise NotExact(f"mixing Q(sqrt{self.d}) and Q(sqrt{other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return Quad(other, 0, self.d)
        return None

    def __add__(self, o):
        q = self._co(o)
        if q is None:
            return complex(self) + o if self.d < 0 else float(self) + o
        return Quad(self.a + q.a, self.b + q.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, o):
        q = self._co(o)
        if q is None:
            return self._fl() - o
        return Quad(self.a - q.a, self.b - q.b, self.d)

    def __rsub__(self, o):
        q = self._co(o)
        if q is None:
            return o - self._fl()
        return Quad(q.a - self.a, q.b - self.b, self.d)

    def __mul__(self, o):
        q = self._co(o)
        if q is None:
            return self._fl() * o
        return Quad(self.a * q.a + self.d * self.b * q.b,
                    self.a * q.b + self.b * q.a, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate_root(self) -> "Quad":
        """Galois conjugate a - b sqrt d (complex conjugation when d = -1)."""
        return Quad(self.a, -self.b, self.d)

    def conjugate(self):
        if self.d < 0:
            return self.conjugate_root()
        return self

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return Quad(self.a / n, -self.b / n, self.d)

    def __truediv__(self, o):
        q = self._co(o)
        if q is None:
            return self._fl() / o
        return self * q.inverse()

    def __rtruediv__(self, o):
        q = self._co(o)
        if q is None:
            return o / self._fl()
        return q * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return self._fl() ** n
        if n < 0:
            return self.inverse() ** (-n)
        r = Quad(1, 0, self.d)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    # comparisons ----------------------------------------------------------
    def sign(self) -> int:
        if self.d < 0:
            raise TypeError("Gaussian rationals are not ordered")
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with d b^2
        return (1 if a > 0 else -1) if a * a > self.d * b * b else (1 if b > 0 else -1)

    def __eq__(self, o):
        q = self._co(o)
        if q is None:
            try:
                return complex(self) == o
            except TypeError:
                return NotImplemented
        return self.a == q.a and self.b == q.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))

    def _cmp(self, o):
        q = self._co(o)
        if q is None:
            return (float(self) > o) - (float(self) < o)
        return (self - q).sign()

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def _fl(self):
        return complex(self) if self.d < 0 else float(self)

    def __float__(self):
        if self.d < 0:
            raise TypeError("complex Quad has no float value")
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __complex__(self):
        if self.d < 0:
            return complex(float(self.a), float(self.b) * math.sqrt(-self.d))
        return complex(float(self))

    @property
    def real(self):
        if self.d < 0:
            return self.a
        return self

    @property
    def imag_part(self):
        return self.b

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        return format_exact(self)


def sqrt2() -> Quad:
    return Quad(0, 1, 2)


def I() -> Quad:
    """The Gaussian rational sqrt(-1)."""
    return Quad(0, 1, -1)


class Dual:
    """a + b*delta with delta^2 = 0, used for exact directional derivatives."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = a
        self.b = b

    def _co(self, o):
        return o if isinstance(o, Dual) else Dual(o, 0)

    def __add__(self, o):
        o = self._co(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, o):
        o = self._co(o)
        return Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._co(o)
        inv = Fraction(1, o.a) if isinstance(o.a, int) else 1 / o.a
        return Dual(self.a * inv, (self.b * o.a - self.a * o.b) * inv * inv)

    def __rtruediv__(self, o):
        return self._co(o) / self

    def __eq__(self, o):
        o = self._co(o)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __lt__(self, o):
        return self.a < self._co(o).a

    def __gt__(self, o):
        return self.a > self._co(o).a

    def __le__(self, o):
        return self.a <= self._co(o).a

    def __ge__(self, o):
        return self.a >= self._co(o).a

    def __abs__(self):
        return -self if sign(self.a) < 0 else self

    def __float__(self):
        return float(self.a)

    def __repr__(self):
        return f"Dual({self.a!r}, {self.b!r})"


# ---------------------------------------------------------------------------
# generic helpers

def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Quad, Dual))


def sign(x) -> int:
    if isinstance(x, Quad):
        return x.sign()
    if isinstance(x, Dual):
        return sign(x.a)
    return int(x > 0) - int(x < 0)


def is_zero(x, tol: float = FLOAT_TOL) -> bool:
    if is_exact(x):
        return not x
    return abs(x) <= tol


def to_float(x):
    if isinstance(x, Quad) and x.d < 0:
        return complex(x)
    if isinstance(x, complex):
        return x
    return float(x)


def conj(x):
    if isinstance(x, Quad):
        return x.conjugate()
    if isinstance(x, complex):
        return x.conjugate()
    return x


def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _frac_sqrt(q: Fraction):
    if q < 0:
        return None
    p = _isqrt_exact(q.numerator)
    r = _isqrt_exact(q.denominator)
    if p is None or r is None:
        return None
    return Fraction(p, r)


def frac_root(q: Fraction, n: int):
    """Exact real n-th root of a rational, or None."""
    q = Fraction(q)
    s = -1 if q < 0 else 1
    if s < 0 and n % 2 == 0:
        return None
    num, den = abs(q.numerator), q.denominator

    def iroot(m):
        if m == 0:
            return 0
        r = round(m ** (1.0 / n))
        for c in (r - 1, r, r + 1):
            if c >= 0 and c ** n == m:
                return c
        return None

    a, b = iroot(num), iroot(den)
    if a is None or b is None:
        return None
    return s * Fraction(a, b)


REAL_ROOTS = (2, 3)


def exact_sqrt(x):
    """Square root inside Q, Q(sqrt2) or Q(sqrt3); None when it leaves them."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        r = _frac_sqrt(x)
        if r is not None:
            return r
        for d in REAL_ROOTS:
            r = _frac_sqrt(x / d)
            if r is not None:
                return Quad(0, r, d)
        return None
    if isinstance(x, Quad):
        if x.d not in REAL_ROOTS:
            return None
        d = x.d
        if x.b == 0:
            r = _frac_sqrt(x.a)
            if r is not None:
                return Quad(r, 0, d)
            r = _frac_sqrt(x.a / d)
            return Quad(0, r, d) if r is not None else None
        # (c + e sqrt d)^2 = c^2 + d e^2 + 2ce sqrt d
        disc = _frac_sqrt(x.a * x.a - d * x.b * x.b)
        if disc is None:
            return None
        for c2 in ((x.a + disc) / 2, (x.a - disc) / 2):
            c = _frac_sqrt(c2)
            if c is None or c == 0:
                continue
            e = x.b / (2 * c)
            r = Quad(c, e, d)
            if r * r == x:
                return r if r.sign() > 0 else -r
        return None
    if isinstance(x, Dual):
        r = exact_sqrt(x.a)
        if r is None:
            return None
        return Dual(r, x.b / (2 * r))
    return None


def sqrt_any(x):
    """Exact square root when available, float otherwise (x >= 0)."""
    r = exact_sqrt(x) if is_exact(x) else None
    if r is not None:
        return r
    if isinstance(x, Dual):
        a = math.sqrt(float(x.a))
        return Dual(a, float(x.b) / (2 * a))
    return math.sqrt(float(x))


# ---------------------------------------------------------------------------
# parsing and printing

def _parse_quad(t: str) -> Quad:
    t = t.replace("sqrt(2)", "sqrt2")
    a = Fraction(0)
    b = Fraction(0)
    for term in re.findall(r"[+-]?[^+-]+", t):
        if term.endswith("sqrt2"):
            c = term[:-5].rstrip("*")
            if c in ("", "+"):
                b += 1
            elif c == "-":
                b -= 1
            else:
                b += Fraction(c)
        else:
            a += Fraction(term)
    return Quad(a, b, 2)


def parse_scalar(s, mode: str = "exact"):
    """Parse a decimal, ``p/q`` or ``a+b*sqrt2`` coefficient string."""
    if isinstance(s, (int, Fraction, Quad)):
        return s if mode == "exact" else to_float(s)
    if isinstance(s, float):
        return Fraction(s) if mode == "exact" else s
    t = str(s).strip().replace(" ", "")
    v = _parse_quad(t) if "sqrt" in t else Fraction(t)
    return v if mode == "exact" else float(v)


def format_float(x: float) -> str:
    """Floats are written with 17 significant digits."""
    return format(float(x), ".17g")


def format_exact(x) -> str:
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Quad):
        if x.b == 0:
            return str(x.a)
        root = "sqrt2" if x.d == 2 else ("i" if x.d == -1 else f"sqrt{x.d}")
        bs = "" if abs(x.b) == 1 else f"{abs(x.b)}*"
        if x.a == 0:
            return f"{'-' if x.b < 0 else ''}{bs}{root}"
        return f"{x.a}{'-' if x.b < 0 else '+'}{bs}{root}"
    if isinstance(x, complex):
        return f"{format_float(x.real)}{'+' if x.imag >= 0 else '-'}{format_float(abs(x.imag))}i"
    return format_float(x)


def format_scalar(x) -> str:
    return format_exact(x) if is_exact(x) else format_float(x)
