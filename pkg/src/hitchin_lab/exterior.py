"""Exterior algebra of R^n (n <= 8) in the lexicographic basis e^{i1...ik}.

Forms carry a numpy coefficient vector: ``dtype=object`` holding exact
scalars, or ``float64``.  Vectors and multivectors use the same container with
``kind="vector"``.  Index labels are 1-based in literals and JSON, 0-based
internally.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from . import scalars as S
from .linalg import det, compound

MAX_DIM = 8


class FormError(ValueError):
    pass


class DegreeError(FormError):
    pass


class DimensionMismatch(FormError):
    pass


class NonDegenerate(FormError):
    """Raised for degenerate metrics and similar invertibility failures."""


@lru_cache(maxsize=None)
def basis(n: int, k: int) -> tuple:
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def index(n: int, k: int) -> dict:
    return {I: i for i, I in enumerate(basis(n, k))}


def perm_sign(seq) -> int:
    seq = list(seq)
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] == seq[j]:
                return 0
            if seq[i] > seq[j]:
                s = -s
    return s


@lru_cache(maxsize=None)
def _wedge_table(n: int, k: int, l: int):
    ia, ib, io, sg = [], [], [], []
    idx = index(n, k + l)
    for a, A in enumerate(basis(n, k)):
        sa = set(A)
        for b, B in enumerate(basis(n, l)):
            if sa.isdisjoint(B):
                ia.append(a)
                ib.append(b)
                io.append(idx[tuple(sorted(A + B))])
                sg.append(perm_sign(A + B))
    return (np.array(ia, dtype=np.intp), np.array(ib, dtype=np.intp),
            np.array(io, dtype=np.intp), np.array(sg, dtype=np.int64))


@lru_cache(maxsize=None)
def _interior_table(n: int, k: int):
    """e_v contracted into e^I in the first slot."""
    iv, ii, io, sg = [], [], [], []
    idx = index(n, k - 1)
    for i, I in enumerate(basis(n, k)):
        for p, v in enumerate(I):
            iv.append(v)
            ii.append(i)
            io.append(idx[I[:p] + I[p + 1:]])
            sg.append(-1 if p % 2 else 1)
    return (np.array(iv, dtype=np.intp), np.array(ii, dtype=np.intp),
            np.array(io, dtype=np.intp), np.array(sg, dtype=np.int64))


@lru_cache(maxsize=None)
def _top_contract_signs(n: int, m: int):
    """sign s_J with e_J contracted into e^{1..n} equal to s_J e^{J^c}."""
    out = []
    full = tuple(range(n))
    cidx = index(n, n - m)
    for J in basis(n, m):
        rest = list(full)
        s = 1
        for j in J:
            p = rest.index(j)
            if p % 2:
                s = -s
            rest.pop(p)
        out.append((cidx[tuple(rest)], s))
    return out


def _is_float(a: np.ndarray) -> bool:
    return a.dtype != object


def _bilinear(table, a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    ia, ib, io, sg = table
    if _is_float(a) and _is_float(b):
        w = sg * a[ia] * b[ib]
        if np.iscomplexobj(w):
            return (np.bincount(io, weights=w.real, minlength=size)
                    + 1j * np.bincount(io, weights=w.imag, minlength=size))
        return np.bincount(io, weights=w, minlength=size)
    out = np.array([0] * size, dtype=object)
    ad, bd = a.astype(object), b.astype(object)
    for x, y, o, s in zip(ia, ib, io, sg):
        p = ad[x] * bd[y]
        if p:
            out[o] = out[o] + p if s > 0 else out[o] - p
    return out


def _zeros(size: int, exact: bool):
    if exact:
        return np.array([Fraction(0)] * size, dtype=object)
    return np.zeros(size)


class KForm:
    """A homogeneous element of Lambda^k (kind='form') or Lambda^k V (kind='vector')."""

    __slots__ = ("n", "k", "c", "kind")

    def __init__(self, n: int, k: int, c=None, kind: str = "form"):
        if not 0 <= k <= n or n > MAX_DIM:
            raise DegreeError(f"degree {k} invalid in dimension {n}")
        self.n, self.k, self.kind = n, k, kind
        size = comb(n, k)
        if c is None:
            c = _zeros(size, True)
        c = np.asarray(c) if not isinstance(c, np.ndarray) else c
        if c.shape != (size,):
            raise DimensionMismatch(f"expected {size} coefficients, got {c.shape}")
        self.c = c

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, n, k, exact=True, kind="form"):
        return cls(n, k, _zeros(comb(n, k), exact), kind)

    @classmethod
    def from_terms(cls, n, terms, exact=True, kind="form", k=None):
        """terms: iterable of (index tuple 0-based, coefficient)."""
        terms = list(terms)
        if k is None:
            if not terms:
                raise DegreeError("cannot infer degree of empty form")
            k = len(terms[0][0])
        f = cls.zero(n, k, exact, kind)
        idx = index(n, k)
        for I, v in terms:
            if len(I) != k:
                raise DegreeError("mixed degrees in literal")
            s = perm_sign(I)
            if s == 0:
                continue
            if any(i < 0 or i >= n for i in I):
                raise DimensionMismatch(f"index out of range in {I}")
            f.c[idx[tuple(sorted(I))]] += s * v
        return f

    @classmethod
    def basis_form(cls, n, I, exact=True):
        return cls.from_terms(n, [(tuple(I), Fraction(1) if exact else 1.0)], exact)

    @classmethod
    def vector(cls, coeffs):
        c = np.array(list(coeffs), dtype=object)
        if all(isinstance(x, float) for x in c):
            c = c.astype(float)
        return cls(len(c), 1, c, "vector")

    # arithmetic -----------------------------------------------------------
    def _check(self, o):
        if not isinstance(o, KForm):
            raise TypeError("expected KForm")
        if o.n != self.n:
            raise DimensionMismatch(f"dimension {self.n} vs {o.n}")
        if o.k != self.k:
            raise DegreeError(f"degree {self.k} vs {o.k}")

    def __add__(self, o):
        self._check(o)
        return KForm(self.n, self.k, self.c + o.c, self.kind)

    def __sub__(self, o):
        self._check(o)
        return KForm(self.n, self.k, self.c - o.c, self.kind)

    def __neg__(self):
        return KForm(self.n, self.k, -self.c, self.kind)

    def __mul__(self, s):
        if isinstance(s, KForm):
            return wedge(self, s)
        return KForm(self.n, self.k, self.c * s, self.kind)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return KForm(self.n, self.k, self.c * (1 / s) if S.is_exact(s) else self.c / s, self.kind)

    def __xor__(self, o):
        return wedge(self, o)

    def __eq__(self, o):
        if not isinstance(o, KForm):
            return NotImplemented
        if (self.n, self.k) != (o.n, o.k):
            return False
        return all(x == y for x, y in zip(self.c, o.c))

    __hash__ = None

    @property
    def exact(self) -> bool:
        return not _is_float(self.c)

    def to_float(self) -> "KForm":
        if not self.exact:
            return self
        vals = [S.to_float(x) for x in self.c]
        dt = complex if any(isinstance(v, complex) for v in vals) else float
        return KForm(self.n, self.k, np.array(vals, dtype=dt), self.kind)

    def map(self, fn) -> "KForm":
        return KForm(self.n, self.k, np.array([fn(x) for x in self.c], dtype=object), self.kind)

    def is_zero(self, tol: float = S.FLOAT_TOL) -> bool:
        return all(S.is_zero(x, tol) for x in self.c)

    def norm_inf(self) -> float:
        if len(self.c) == 0:
            return 0.0
        return float(max(abs(complex(S.to_float(x))) for x in self.c))

    def terms(self):
        for I, v in zip(basis(self.n, self.k), self.c):
            if not S.is_zero(v, 0.0):
                yield I, v

    def __getitem__(self, I):
        I = tuple(I)
        s = perm_sign(I)
        if s == 0:
            return 0
        return s * self.c[index(self.n, self.k)[tuple(sorted(I))]]

    def __repr__(self):
        return f"KForm(n={self.n}, k={self.k}, {to_literal(self)})"

    def __str__(self):
        return to_literal(self)

    def top_coeff(self):
        if self.k != self.n:
            raise DegreeError("not a top-degree form")
        return self.c[0]

    def as_matrix(self) -> np.ndarray:
        """Skew matrix of a 2-form or 2-vector: M[i, j] = coefficient on (i, j)."""
        if self.k != 2:
            raise DegreeError("as_matrix needs degree 2")
        n = self.n
        M = np.array([[0] * n for _ in range(n)], dtype=object) if self.exact else np.zeros((n, n), dtype=self.c.dtype)
        if self.exact:
            M[:, :] = Fraction(0)
        for (i, j), v in zip(basis(n, 2), self.c):
            M[i, j] = v
            M[j, i] = -v
        return M


# ---------------------------------------------------------------------------
# operations

def wedge(a: KForm, b: KForm) -> KForm:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension {a.n} vs {b.n}")
    if a.kind != b.kind:
        raise FormError("cannot wedge a form with a multivector")
    n, k = a.n, a.k + b.k
    if k > n:
        raise DegreeError(f"degree {k} exceeds dimension {n}")
    c = _bilinear(_wedge_table(n, a.k, b.k), a.c, b.c, comb(n, k))
    return KForm(n, k, c, a.kind)


def wedge_all(*forms: KForm) -> KForm:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def interior(v, a: KForm) -> KForm:
    """Contraction of a vector (KForm kind='vector', or coefficient list) in the first slot."""
    vc = v.c if isinstance(v, KForm) else np.asarray(v)
    if isinstance(v, KForm) and v.k != 1:
        return contract(v, a)
    if len(vc) != a.n:
        raise DimensionMismatch(f"vector of length {len(vc)} in dimension {a.n}")
    if a.k == 0:
        raise DegreeError("cannot contract into a 0-form")
    iv, ii, io, sg = _interior_table(a.n, a.k)
    size = comb(a.n, a.k - 1)
    if _is_float(a.c) and (vc.dtype != object):
        w = sg * vc[iv] * a.c[ii]
        out = np.bincount(io, weights=w, minlength=size) if not np.iscomplexobj(w) else (
            np.bincount(io, weights=w.real, minlength=size) + 1j * np.bincount(io, weights=w.imag, minlength=size))
        return KForm(a.n, a.k - 1, out)
    out = _zeros(size, True)
    ac = a.c.astype(object)
    for x, y, o, s in zip(iv, ii, io, sg):
        p = vc[x] * ac[y]
        if p:
            out[o] = out[o] + p if s > 0 else out[o] - p
    if not a.exact and all(isinstance(t, float) or t == 0 for t in out):
        out = out.astype(float)
    return KForm(a.n, a.k - 1, out)


def contract(w: KForm, a: KForm) -> KForm:
    """Multivector e_{j1..jm} acts as e_{jm} ... e_{j1}: alpha(v_j1, ..., v_jm, ...)."""
    if w.k == 0:
        return a * w.c[0]
    out = None
    n = a.n
    for J, coef in w.terms():
        r = a
        for j in J:
            e = [0] * n
            e[j] = 1
            r = interior(np.array(e, dtype=object if a.exact else float), r)
        r = r * coef
        out = r if out is None else out + r
    if out is None:
        return KForm.zero(n, a.k - w.k, a.exact)
    return out


def top_form(n: int, exact: bool = True) -> KForm:
    return KForm.basis_form(n, tuple(range(n)), exact) if exact else KForm.basis_form(n, tuple(range(n))).to_float()


def kappa_dual(a: KForm, orientation=1) -> KForm:
    """The multivector w with w contracted into (orientation * e^{1..n}) equal to a."""
    n, k = a.n, a.k
    m = n - k
    signs = _top_contract_signs(n, m)
    exact = a.exact and S.is_exact(orientation)
    out = _zeros(comb(n, m), exact) if exact else np.zeros(comb(n, m), dtype=a.c.dtype)
    inv = (Fraction(1, orientation) if isinstance(orientation, int) else 1 / orientation) if S.is_exact(orientation) else 1.0 / orientation
    for j, (ci, s) in enumerate(signs):
        out[j] = a.c[ci] * s * inv
    return KForm(n, m, out, "vector")


def pullback(A, a: KForm) -> KForm:
    """(A^* a)(v1..vk) = a(A v1, ..., A vk); A[i, j] is the i-th component of A e_j."""
    A = np.asarray(A)
    if A.shape[0] != a.n:
        raise DimensionMismatch("matrix rows must match form dimension")
    m = A.shape[1]
    C = compound(A, a.k)
    if a.exact and A.dtype == object:
        out = C.T.dot(a.c)
    else:
        out = C.T.astype(complex if np.iscomplexobj(C) or np.iscomplexobj(a.c) else float) @ (
            a.c.astype(float) if a.exact else a.c)
    return KForm(m, a.k, np.asarray(out, dtype=object) if (a.exact and A.dtype == object) else out)


def push_vector(A, v: KForm) -> KForm:
    return KForm(v.n, v.k, compound(np.asarray(A), v.k).dot(v.c), "vector")


def restrict(a: KForm, B) -> KForm:
    """Restriction to span of the columns of B (columns are vectors of R^n)."""
    return pullback(B, a)


def embed(a: KForm, n: int, positions=None) -> KForm:
    """Include a form on R^m into R^n via coordinates positions (default first m)."""
    positions = list(range(a.n)) if positions is None else list(positions)
    return KForm.from_terms(n, [(tuple(positions[i] for i in I), v) for I, v in zip(basis(a.n, a.k), a.c)],
                            exact=a.exact, k=a.k) if a.exact else _embed_float(a, n, positions)


def _embed_float(a, n, positions):
    f = KForm.zero(n, a.k, exact=False)
    idx = index(n, a.k)
    for I, v in zip(basis(a.n, a.k), a.c):
        J = tuple(positions[i] for i in I)
        s = perm_sign(J)
        f.c[idx[tuple(sorted(J))]] += s * v
    return f


def metric_on_forms(g, k: int):
    """Gram matrix of the metric induced on Lambda^k by the inverse of g."""
    from .linalg import inverse
    return compound(inverse(np.asarray(g)), k)


def hodge(beta: KForm, g, orientation: int = 1) -> KForm:
    """Hodge star with alpha ^ *beta = <alpha, beta> vol_g."""
    g = np.asarray(g)
    n, k = beta.n, beta.k
    if g.shape != (n, n):
        raise DimensionMismatch("metric shape")
    dg = det(g)
    if S.is_zero(dg, 1e-14):
        raise NonDegenerate("degenerate metric")
    exact = beta.exact and g.dtype == object
    vol = S.sqrt_any(abs(dg)) if exact else float(np.sqrt(abs(float(dg))))
    if orientation < 0:
        vol = -vol
    G = metric_on_forms(g, k)
    gb = G.dot(beta.c)
    cidx = index(n, n - k)
    if exact and not S.is_exact(vol):
        exact = False
    out = _zeros(comb(n, n - k), exact) if exact else np.zeros(comb(n, n - k))
    for i, I in enumerate(basis(n, k)):
        Ic = tuple(x for x in range(n) if x not in I)
        out[cidx[Ic]] += perm_sign(I + Ic) * gb[i] * vol
    return KForm(n, n - k, out)


def inner(a: KForm, b: KForm, g):
    return a.c.dot(metric_on_forms(np.asarray(g), a.k).dot(b.c))


def two_form_from_matrix(M) -> KForm:
    M = np.asarray(M)
    n = M.shape[0]
    c = np.array([M[i, j] for i, j in basis(n, 2)], dtype=M.dtype)
    return KForm(n, 2, c)


# ---------------------------------------------------------------------------
# literal syntax and JSON

_TOKEN = re.compile(r"([ef])(\d+)")


def _parse_index_word(word: str, n: int, fshift: int):
    """'e135' -> (0,2,4); 'e12f3' -> e1,e2,f3 with f_i at fshift + i."""
    idx = []
    pos = 0
    for m in _TOKEN.finditer(word):
        if m.start() != pos:
            raise FormError(f"bad basis word {word!r}")
        pos = m.end()
        shift = 0 if m.group(1) == "e" else fshift
        for ch in m.group(2):
            idx.append(shift + int(ch) - 1)
    if pos != len(word) or not idx:
        raise FormError(f"bad basis word {word!r}")
    return tuple(idx)


def parse_form(text: str, n: int, mode: str = "exact", fshift: int = 3) -> KForm:
    """Parse ``"e135 - e146 - 1/2*e236"`` style literals (``f`` letters allowed)."""
    t = text.replace(" ", "")
    if not t:
        raise FormError("empty form literal")
    if t in ("0",):
        raise DegreeError("zero literal has no degree")
    terms = []
    for m in re.finditer(r"([+-]?)([^+-]*?)\*?((?:[ef]\d+)+)", t):
        sgn, coef, word = m.groups()
        c = S.parse_scalar(coef, mode) if coef else (Fraction(1) if mode == "exact" else 1.0)
        if sgn == "-":
            c = -c
        terms.append((_parse_index_word(word, n, fshift), c))
    joined = "".join(m.group(0) for m in re.finditer(r"([+-]?)([^+-]*?)\*?((?:[ef]\d+)+)", t))
    if joined != t:
        raise FormError(f"cannot parse form literal {text!r}")
    return KForm.from_terms(n, terms, exact=(mode == "exact"))


def parse_form_json(data, n: int, mode: str = "exact") -> KForm:
    if isinstance(data, str):
        data = json.loads(data)
    terms = [(tuple(i - 1 for i in t["idx"]), S.parse_scalar(t["c"], mode)) for t in data]
    return KForm.from_terms(n, terms, exact=(mode == "exact"))


def form_to_json(a: KForm):
    return [{"idx": [i + 1 for i in I], "c": S.format_scalar(v)} for I, v in a.terms()]


def to_literal(a: KForm) -> str:
    parts = []
    for I, v in a.terms():
        word = "e" + "".join(str(i + 1) for i in I) if I else "1"
        s = S.format_scalar(v)
        if s == "1":
            parts.append(("+", word))
        elif s == "-1":
            parts.append(("-", word))
        elif s.startswith("-") and ("+" not in s[1:] and "-" not in s[1:]):
            parts.append(("-", f"{s[1:]}*{word}"))
        elif ("+" in s[1:] or "-" in s[1:]):
            parts.append(("+", f"({s})*{word}"))
        else:
            parts.append(("+", f"{s}*{word}"))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sg, w in parts[1:]:
        out += f" {sg} {w}"
    return out
