"""Chevalley-Eilenberg complexes of Lie algebras, and tools specific to h3 + h3."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np

from . import scalars as S
from .exterior import (DegreeError, DimensionMismatch, FormError, KForm, basis, interior,
                       parse_form, pullback, wedge, wedge_all)
from .linalg import det, inverse, nullspace, rank, identity
from .stable import K_matrix, NotStable, analyze3, omega_volume


class NotALieAlgebra(FormError):
    pass


class NotInDomain(FormError):
    pass


class LieAlgebra:
    """A Lie algebra given by d on the dual basis: d1[i] = d e^{i+1} (a 2-form)."""

    def __init__(self, d1, name: str = "", check: bool = True):
        self.d1 = list(d1)
        self.n = len(self.d1)
        self.name = name
        for a in self.d1:
            if a.n != self.n or a.k != 2:
                raise DimensionMismatch("structure 2-forms must live in the algebra's dimension")
        self._mats = {}
        if check:
            self.check_jacobi()

    @classmethod
    def from_salamon(cls, text: str, name: str = ""):
        """``"0,0,0,0,e12,e34"`` (parentheses optional)."""
        parts = [p.strip() for p in text.strip().strip("()").split(",")]
        n = len(parts)
        d1 = [KForm.zero(n, 2) if p in ("0", "") else parse_form(p, n) for p in parts]
        return cls(d1, name or text)

    def _d_matrix(self, k: int) -> np.ndarray:
        if k in self._mats:
            return self._mats[k]
        n = self.n
        cols = []
        for I in basis(n, k):
            out = KForm.zero(n, k + 1) if k + 1 <= n else None
            if out is None:
                break
            for pos, i in enumerate(I):
                left = KForm.basis_form(n, I[:pos]) if pos else None
                right = KForm.basis_form(n, I[pos + 1:]) if pos + 1 < len(I) else None
                term = self.d1[i]
                if left is not None:
                    term = wedge(left, term)
                if right is not None:
                    term = wedge(term, right)
                out = out + term * (-1 if pos % 2 else 1)
            cols.append(out.c)
        if k + 1 > n:
            M = np.empty((0, comb(n, k)), dtype=object)
        else:
            M = np.array(cols, dtype=object).T.reshape(comb(n, k + 1), comb(n, k))
        self._mats[k] = M
        self._mats[("f", k)] = np.array([[S.to_float(x) for x in r] for r in M]) if M.size else np.zeros(M.shape)
        return M

    def d(self, a: KForm) -> KForm:
        if a.n != self.n:
            raise DimensionMismatch(f"form of dimension {a.n} on a {self.n}-dimensional algebra")
        if a.k == self.n:
            return KForm.zero(self.n, self.n, a.exact) if False else _zero_top_plus(a)
        M = self._d_matrix(a.k)
        if a.exact:
            return KForm(self.n, a.k + 1, M.dot(a.c))
        return KForm(self.n, a.k + 1, self._mats[("f", a.k)] @ a.c)

    def check_jacobi(self):
        for i in range(self.n):
            if not self.d(self.d1[i]).is_zero(0.0):
                raise NotALieAlgebra(f"d^2 e^{i + 1} != 0")

    def lie_derivative(self, X, a: KForm) -> KForm:
        """Cartan's formula d(X -| a) + X -| d a for left-invariant X."""
        X = np.asarray(X)
        first = self.d(interior(X, a)) if a.k > 0 else KForm.zero(self.n, 1, a.exact)
        if a.k == self.n:
            return first
        return first + interior(X, self.d(a))

    def is_nilpotent(self) -> bool:
        # nilpotent iff some power of every ad is zero; check via lower central series on the dual side
        ad = self.ad_matrices()
        M = [np.array([[S.to_float(x) for x in r] for r in A]) for A in ad]
        P = np.eye(self.n)
        for _ in range(self.n):
            P = sum(A @ P for A in M) if False else P
        return all(np.allclose(np.linalg.matrix_power(A, self.n), 0) for A in M)

    def ad_matrices(self):
        """[e_i, e_j] = - sum_k c^k_ij e_k with d e^k = sum_{i<j} c^k_ij e^{ij}; returns ad(e_i)."""
        n = self.n
        mats = []
        for i in range(n):
            A = np.empty((n, n), dtype=object)
            A[:, :] = Fraction(0)
            for j in range(n):
                for k in range(n):
                    # d e^k (e_i, e_j) = - e^k([e_i, e_j])
                    A[k, j] = -self.d1[k][(i, j)] if i != j else Fraction(0)
            mats.append(A)
        return mats

    def transform(self, T) -> "LieAlgebra":
        """The same algebra in the coframe ~e^i = sum_j T[i, j] e^j."""
        T = np.asarray(T, dtype=object)
        Ti = inverse(T)
        new = []
        for i in range(self.n):
            de = KForm.zero(self.n, 2)
            for j in range(self.n):
                if T[i, j]:
                    de = de + self.d1[j] * T[i, j]
            # express in the new coframe: e^j = sum Ti[j, l] ~e^l
            new.append(pullback(Ti, de))
        return LieAlgebra(new, self.name + "'")


def _zero_top_plus(a):
    raise DegreeError("d of a top-degree form leaves the complex")


# ---------------------------------------------------------------------------
# standard algebras

def h3h3() -> LieAlgebra:
    return LieAlgebra.from_salamon("0,0,e12,0,0,f12", "h3+h3")


def su2su2(scale=1) -> LieAlgebra:
    """su(2) + su(2) with d e^i = scale e^{jk}, d f^i = scale f^{jk} (cyclic)."""
    s = S.parse_scalar(scale) if isinstance(scale, str) else scale
    d1 = [parse_form(w, 6) * s for w in ("e23", "e31", "e12", "f23", "f31", "f12")]
    return LieAlgebra(d1, "su2+su2")


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra([KForm.zero(n, 2) for _ in range(n)], f"R^{n}")


def product_with_line(L: LieAlgebra) -> LieAlgebra:
    """L + R, the new coordinate last."""
    from .exterior import embed
    n = L.n + 1
    return LieAlgebra([embed(a, n) for a in L.d1] + [KForm.zero(n, 2)], L.name + "+R")


TRICK17 = {
    "n1": "0,0,0,0,e12,e34",
    "n2": "0,0,0,0,e13+e42,e14+e23",
    "n3": "0,0,0,0,e12,e14+e23",
    "n4": "0,0,0,0,0,e12+e34",
}


def trick17_algebra(key: str) -> LieAlgebra:
    return LieAlgebra.from_salamon(TRICK17[key], key)


def trick17_U(L: LieAlgebra, key: str) -> list:
    """Basis of U (as 1-form coefficient vectors) used by the closedness lemma."""
    if key == "n4":
        return [[Fraction(int(i == j)) for i in range(6)] for j in range(4)]
    M = L._d_matrix(1)
    return nullspace(M)


# ---------------------------------------------------------------------------
# h3 + h3: automorphisms and two-form normal forms

def aut0(A, a, B, b, c, d) -> np.ndarray:
    """Automorphism in block form; acts by ~e^i = sum_j M[i, j] e^j."""
    fr = lambda x: Fraction(x) if isinstance(x, int) else x
    M = np.empty((6, 6), dtype=object)
    M[:, :] = Fraction(0)
    for i in range(2):
        for j in range(2):
            M[i, j] = fr(A[i][j])
            M[3 + i, 3 + j] = fr(B[i][j])
    M[2, 0:2] = [fr(x) for x in a]
    M[2, 2] = fr(A[0][0]) * fr(A[1][1]) - fr(A[0][1]) * fr(A[1][0])
    M[2, 3:5] = [fr(x) for x in c]
    M[5, 0:2] = [fr(x) for x in d]
    M[5, 3:5] = [fr(x) for x in b]
    M[5, 5] = fr(B[0][0]) * fr(B[1][1]) - fr(B[0][1]) * fr(B[1][0])
    return M


def swap_summands() -> np.ndarray:
    M = np.empty((6, 6), dtype=object)
    M[:, :] = Fraction(0)
    for i in range(3):
        M[i, 3 + i] = Fraction(1)
        M[3 + i, i] = Fraction(1)
    return M


def is_automorphism(L: LieAlgebra, M) -> bool:
    """M^* commutes with d on 1-forms."""
    for i in range(L.n):
        e = KForm.basis_form(L.n, (i,))
        if not (L.d(pullback(M, e)) == pullback(M, L.d(e))):
            return False
    return True


OMEGA_NORMAL = {
    1: "e1f1 + e2f2 + e3f3",
    2: "e2f2 + e13 + f13",
    3: "e1f3 + e2f2 + e3f1",
    5: "e1f3 + e2f2 + e13 + f13",
}


def omega_normal(kind: int, beta=Fraction(0)) -> KForm:
    if kind == 4:
        if beta == -1:
            raise ValueError("beta = -1 is excluded")
        return parse_form(OMEGA_NORMAL[3] + " + e13", 6) + parse_form("f13", 6) * beta
    return parse_form(OMEGA_NORMAL[kind], 6)


def _coeffs(om: KForm):
    """(alpha, beta, gamma) with om = sum alpha_i e^{(i+1)(i+2)} + beta_i f^{..} + gamma_ij e^i f^j."""
    al = [om[(1, 2)], om[(2, 0)], om[(0, 1)]]
    be = [om[(4, 5)], om[(5, 3)], om[(3, 4)]]
    ga = [[om[(i, 3 + j)] for j in range(3)] for i in range(3)]
    return al, be, ga


def projections(om: KForm) -> dict:
    al, be, ga = _coeffs(om)
    return {
        "k1": [ga[2][2]],
        "k2": [ga[0][2], ga[1][2]],
        "k3": [ga[2][0], ga[2][1]],
        "k4": [al[0], al[1], be[0], be[1]],
    }


def _nz(v) -> bool:
    return any(x != 0 for x in v)


def _complement(x, y):
    """2x2 matrix A with A^T (x, y) = (x^2 + y^2, 0)."""
    return [[x, -y], [y, x]]


@dataclass
class TwoFormClass:
    kind: int
    normal: KForm
    T: np.ndarray
    scale: object
    beta: object = None
    projections: dict = None


def classify_two_form(om: KForm, L: LieAlgebra | None = None) -> TwoFormClass:
    """Orbit type of a stable omega with d(omega^2) = 0 on h3 + h3, with T^* om = scale * normal."""
    L = L or h3h3()
    if not om.exact:
        raise NotInDomain("classification is exact only")
    if omega_volume(om) == 0:
        raise NotStable("omega is degenerate")
    if not L.d(wedge(om, om)).is_zero(0.0):
        raise NotInDomain("d(omega^2) != 0")
    pr = projections(om)
    if _nz(pr["k1"]):
        T = _normalize_1(om)
        kind = 1
    elif not _nz(pr["k2"]) and not _nz(pr["k3"]):
        T = _normalize_2(om)
        kind = 2
    elif _nz(pr["k2"]) and _nz(pr["k3"]):
        T, kind = _normalize_34(om)
    else:
        T = _normalize_5(om)
        kind = 5
    res = pullback(T, om)
    beta = None
    if kind == 4:
        c = res[(0, 5)]
        beta = res[(3, 5)] / c
        normal = omega_normal(4, beta)
    else:
        normal = omega_normal(kind)
    ref = next(I for I, v in normal.terms())
    scale = res[ref] / normal[ref]
    if not (res == normal * scale):
        raise AssertionError(f"normalisation to type {kind} failed: {res}")
    return TwoFormClass(kind, normal, T, scale, beta, pr)


def _id_aut():
    return aut0([[1, 0], [0, 1]], [0, 0], [[1, 0], [0, 1]], [0, 0], [0, 0], [0, 0])


def _normalize_1(om):
    g33 = om[(2, 5)]
    w = om * (1 / g33)
    al, be, ga = _coeffs(w)
    a1, a2, _ = al
    b1, b2, _ = be
    G = lambda i, j: ga[i - 1][j - 1]
    B = [[G(2, 2) - G(2, 3) * G(3, 2) - a1 * b1, -G(1, 2) - b1 * a2 + G(3, 2) * G(1, 3)],
         [-G(2, 1) + G(3, 1) * G(2, 3) - b2 * a1, G(1, 1) - a2 * b2 - G(1, 3) * G(3, 1)]]
    b = [-G(3, 1) * G(2, 2) + G(3, 1) * a1 * b1 + G(3, 2) * G(2, 1) + G(3, 2) * b2 * a1,
         G(3, 1) * G(1, 2) + G(3, 1) * b1 * a2 - G(3, 2) * G(1, 1) + G(3, 2) * a2 * b2]
    c = [b2 * G(2, 2) - b2 * G(2, 3) * G(3, 2) + b1 * G(2, 1) - b1 * G(3, 1) * G(2, 3),
         -b2 * G(1, 2) + b2 * G(3, 2) * G(1, 3) - b1 * G(1, 1) + b1 * G(1, 3) * G(3, 1)]
    d = [-a2, a1]
    return aut0([[1, 0], [0, 1]], [-G(1, 3), -G(2, 3)], B, b, c, d)


def _prep_alpha(om):
    """Achieve alpha_1 = 0, alpha_2 != 0 (first summand) by a change of A."""
    al, _, _ = _coeffs(om)
    if al[0] == 0:
        return _id_aut()
    x, y = al[0], al[1]
    # rows of A: (a1, a2), (a3, a4) = (y, x), (-x, y)
    return aut0([[y, x], [-x, y]], [0, 0], [[1, 0], [0, 1]], [0, 0], [0, 0], [0, 0])


def _prep_beta(om):
    _, be, _ = _coeffs(om)
    if be[0] == 0:
        return _id_aut()
    x, y = be[0], be[1]
    return aut0([[1, 0], [0, 1]], [0, 0], [[y, x], [-x, y]], [0, 0], [0, 0], [0, 0])


def _prep_g23(om):
    """Achieve gamma_23 = 0, gamma_13 != 0."""
    _, _, ga = _coeffs(om)
    x, y = ga[0][2], ga[1][2]
    if y == 0:
        return _id_aut()
    return aut0([[x, -y], [y, x]], [0, 0], [[1, 0], [0, 1]], [0, 0], [0, 0], [0, 0])


def _prep_g32(om):
    """Achieve gamma_32 = 0, gamma_31 != 0."""
    _, _, ga = _coeffs(om)
    x, y = ga[2][0], ga[2][1]
    if y == 0:
        return _id_aut()
    return aut0([[1, 0], [0, 1]], [0, 0], [[x, -y], [y, x]], [0, 0], [0, 0], [0, 0])


def _chain(om, *steps):
    """Apply preparation steps in turn; returns the accumulated T and the transformed form."""
    T = _id_aut()
    cur = om
    for step in steps:
        M = step(cur)
        cur = pullback(M, cur)
        T = T.dot(M)
    return T, cur


def _normalize_2(om):
    T, cur = _chain(om, _prep_alpha, _prep_beta)
    g22 = cur[(1, 4)]
    w = cur * (1 / g22)
    al, be, ga = _coeffs(w)
    a2, a3 = al[1], al[2]
    b2, b3 = be[1], be[2]
    G = lambda i, j: ga[i - 1][j - 1]
    M = aut0([[1, 0], [0, -b2]], [0, -a3 * b2 / a2], [[1, 0], [0, -a2]], [0, -a2 * b3 / b2],
             [G(1, 1) / a2, -G(1, 2)], [0, G(2, 1)])
    return T.dot(M)


def _normalize_34(om):
    T, cur = _chain(om, _prep_g23, _prep_g32)
    g22 = cur[(1, 4)]
    w = cur * (1 / g22)
    al, be, ga = _coeffs(w)
    a2, a3 = al[1], al[2]
    b2, b3 = be[1], be[2]
    G = lambda i, j: ga[i - 1][j - 1]
    g13, g31 = G(1, 3), G(3, 1)
    A = [[1, 0], [(a2 * b3 - g31 * G(1, 2)) / g31, g13]]
    B = [[1, 0], [(b2 * a3 - g13 * G(2, 1)) / g13, g31]]
    b5 = (G(1, 2) * g13 * G(2, 1) * g31 - G(1, 1) * g13 * g31 - a2 * a3 * b2 * b3) / (g13 * g13 * g31)
    M = aut0(A, [0, 0], B, [b5, 0], [0, b3], [0, -a3])
    T = T.dot(M)
    cur = pullback(T, om)
    al, be, ga = _coeffs(cur)
    if al[1] == 0 and be[1] == 0:
        return T, 3
    if al[1] == 0:
        T = T.dot(swap_summands())
        T2, kind = _normalize_34(pullback(T, om))
        return T.dot(T2), kind
    # cur = s (omega_3 + p e^13 + q f^13); diag(1, p), diag(p, p) scales it to s p^2 (omega_4 with beta = p q)
    s = cur[(0, 5)]
    p = cur[(0, 2)] / s
    M2 = aut0([[1, 0], [0, p]], [0, 0], [[p, 0], [0, p]], [0, 0], [0, 0], [0, 0])
    return T.dot(M2), 4


def _normalize_5(om):
    pr = projections(om)
    T = _id_aut()
    if not _nz(pr["k2"]):
        T = swap_summands()
    T2, cur = _chain(pullback(T, om), _prep_g23, _prep_beta)
    T = T.dot(T2)
    g22 = cur[(1, 4)]
    w = cur * (1 / g22)
    al, be, ga = _coeffs(w)
    a2, a3 = al[1], al[2]
    b2, b3 = be[1], be[2]
    G = lambda i, j: ga[i - 1][j - 1]
    g13 = G(1, 3)
    M = aut0([[1, 0], [0, -g13 * g13 / b2]],
             [0, g13 * g13 * (g13 * G(2, 1) - a3 * b2) / (a2 * b2 * b2)],
             [[-g13 / b2, 0], [0, -a2]], [0, -b3 * a2 / b2],
             [0, -(G(1, 2) * b2 + g13 * b3) / b2],
             [-G(1, 1) / b2, g13 * g13 * G(2, 1) / (b2 * b2)])
    return T.dot(M)


# ---------------------------------------------------------------------------
# half-flat families

RHO1_TERMS = [
    ["e123"], ["f123"], ["e1f23"], ["e2f13"], ["e23f1"], ["e13f2"],
    ["e2f23", "-e1f13"], ["e12f3", "-e3f12"], ["e23f2", "-e13f1"],
]


def rho1_basis() -> list:
    return [parse_form("".join(w if w.startswith("-") else "+" + w for w in words), 6) for words in RHO1_TERMS]


def rho1(a) -> KForm:
    """a1 e^123 + a2 f^123 + ... + a9 (e^23 f^2 - e^13 f^1)."""
    if len(a) != 9:
        raise ValueError("rho1 takes nine parameters")
    exact = all(S.is_exact(x) for x in a)
    out = KForm.zero(6, 3, exact)
    for coef, b in zip(a, rho1_basis()):
        out = out + (b if exact else b.to_float()) * coef
    return out


def lambda_rho1_printed(a):
    """The quartic as printed for the rho1 family (oracle)."""
    a1, a2, a3, a4, a5, a6, a7, a8, a9 = a
    return (2 * a6 * a4 * a8 ** 2 + 2 * a1 * a2 * a8 ** 2 + 2 * a8 ** 2 * a3 * a5 - 4 * a5 * a7 ** 2 * a6
            - 4 * a9 ** 2 * a4 * a3 - 4 * a9 ** 2 * a2 * a8 + 4 * a7 ** 2 * a8 * a1 + 4 * a7 * a8 ** 2 * a9
            + a1 ** 2 * a2 ** 2 + a6 ** 2 * a4 ** 2 + a3 ** 2 * a5 ** 2 + a8 ** 4 - 2 * a6 * a4 * a3 * a5
            + 4 * a5 * a7 * a9 * a3 + 4 * a9 * a4 * a6 * a7 - 4 * a5 * a2 * a6 * a8 + 4 * a4 * a8 * a1 * a3
            - 4 * a9 * a2 * a1 * a7 - 2 * a1 * a2 * a6 * a4 - 2 * a1 * a2 * a3 * a5)


def halfflat_system(L: LieAlgebra, om: KForm) -> np.ndarray:
    """Linear map rho -> (d rho, om ^ rho) on Lambda^3."""
    cols = []
    for I in basis(6, 3):
        r = KForm.basis_form(6, I)
        cols.append(np.concatenate([L.d(r).c, wedge(om, r).c]))
    return np.array(cols, dtype=object).T


def halfflat_family(om: KForm, L: LieAlgebra | None = None) -> list:
    """Basis of closed 3-forms compatible with om."""
    L = L or h3h3()
    ns = nullspace(halfflat_system(L, om))
    fam = [KForm(6, 3, np.array(v, dtype=object)) for v in ns]
    if om == omega_normal(1):
        rb = rho1_basis()
        M = np.array([b.c for b in fam + rb], dtype=object)
        if rank(M) != len(fam) or len(rb) != len(fam):
            raise AssertionError("rho1 family does not span the solution space")
        return rb
    return fam


def closed_three_forms(L: LieAlgebra) -> list:
    return [KForm(L.n, 3, np.array(v, dtype=object)) for v in nullspace(L._d_matrix(3))]


# ---------------------------------------------------------------------------
# lemma checks on random samples

def _rand_frac(rng, lo=-6, hi=6, den=4):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_combination(rng, forms):
    out = forms[0] * _rand_frac(rng)
    for f in forms[1:]:
        out = out + f * _rand_frac(rng)
    return out


def unnormalized_hat(rho: KForm) -> KForm:
    """K^* rho = phi(rho)^3 hat(rho): exact and a positive multiple of hat(rho)."""
    return pullback(K_matrix(rho), rho)


def trick17_check(key: str, samples: int = 500, seed: int = 0) -> dict:
    """For random closed stable rho: U is J-invariant and d hat(rho) lies in Lambda^4 U."""
    rng = random.Random(seed)
    L = trick17_algebra(key)
    U = trick17_U(L, key)
    closed = closed_three_forms(L)
    Umat = np.array(U, dtype=object)
    r = rank(Umat)
    # Lambda^4 U spanned by wedges of U basis
    U1 = [KForm(6, 1, np.array(u, dtype=object)) for u in U]
    from itertools import combinations
    L4 = [wedge_all(*c).c for c in combinations(U1, 4)]
    L4mat = np.array(L4, dtype=object) if L4 else np.empty((0, 15), dtype=object)
    r4 = rank(L4mat) if len(L4) else 0
    ok = tested = 0
    for _ in range(samples * 3):
        if tested >= samples:
            break
        rho = random_combination(rng, closed)
        K = K_matrix(rho)
        lam = sum(K.dot(K)[i, i] for i in range(6)) / 6
        if lam == 0:
            continue
        tested += 1
        # J^* on 1-forms is K^T / phi; invariance is scale free
        good = True
        for u in U:
            img = K.T.dot(np.array(u, dtype=object))
            if rank(np.vstack([Umat, img])) != r:
                good = False
                break
        if good:
            dh = L.d(pullback(K, rho))
            if not dh.is_zero(0.0):
                good = rank(np.vstack([L4mat, dh.c])) == r4 if len(L4) else False
        ok += good
    return {"algebra": key, "samples": tested, "passed": ok}


def random_stable(rng, eps: int, n: int = 6, size: int = 3):
    """A random exactly-normalisable stable 3-form: the normal form pulled back by a rational matrix."""
    from .stable import normal_rho
    while True:
        A = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                A[i, j] = Fraction(rng.randint(-size, size))
        if det(A) != 0:
            return pullback(A, normal_rho(eps)), A


def hat_interior_check(samples: int = 200, seed: int = 1) -> dict:
    """hat(rho)_X ^ rho = - hat(rho) ^ rho_X, with alpha_X = X -| alpha."""
    rng = random.Random(seed)
    ok = 0
    for s in range(samples):
        eps = 1 if s % 2 else -1
        rho, _ = random_stable(rng, eps)
        st = analyze3(rho)
        if not st.exact:
            continue
        X = np.array([Fraction(rng.randint(-4, 4)) for _ in range(6)], dtype=object)
        lhs = wedge(interior(X, st.hat), rho)
        rhs = -wedge(st.hat, interior(X, rho))
        ok += lhs == rhs
    return {"samples": samples, "passed": ok}


def d_hat_interior_check(samples: int = 100, seed: int = 2) -> dict:
    """(d hat(rho))_X ^ rho = hat(rho) ^ (d rho)_X on h3 + h3; both vanish for closed rho."""
    rng = random.Random(seed)
    L = h3h3()
    closed = closed_three_forms(L)
    ok = tested = 0
    while tested < samples:
        rho = random_combination(rng, closed)
        K = K_matrix(rho)
        if sum(K.dot(K)[i, i] for i in range(6)) == 0:
            continue
        tested += 1
        h = pullback(K, rho)
        X = np.array([Fraction(rng.randint(-4, 4)) for _ in range(6)], dtype=object)
        lhs = wedge(interior(X, L.d(h)), rho)
        rhs = wedge(h, interior(X, L.d(rho)))
        ok += lhs == rhs
    return {"samples": samples, "passed": ok}


def lie_lemma_check(L: LieAlgebra, samples: int = 50, seed: int = 3) -> dict:
    """L_X phi(rho) = hat(rho) ^ L_X rho for left-invariant X."""
    from .exterior import top_form
    rng = random.Random(seed)
    ok = 0
    for s in range(samples):
        rho, _ = random_stable(rng, 1 if s % 2 else -1)
        st = analyze3(rho)
        X = np.array([Fraction(rng.randint(-3, 3)) for _ in range(6)], dtype=object)
        vol = top_form(6) * st.phi
        lhs = L.lie_derivative(X, vol)
        rhs = wedge(st.hat, L.lie_derivative(X, rho))
        ok += lhs == rhs
    return {"samples": samples, "passed": ok}
