"""Real forms of the symplectic module of complex three-vectors in six variables.

Vectors of L = Lambda^3 C^6 are coefficient arrays of length 20 over the
lexicographic triples of (e1, e2, e3, f1, f2, f3); entries are Gaussian
rationals (``Quad`` with d = -1). Sesquilinear forms are linear in the
first slot and conjugate-linear in the second.

The para-complex picture is handled without a para-complex scalar type: a
para-complex three-vector a + e b is stored as the pair of real forms (a, b).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import scalars as S
from .exterior import FormError, KForm, basis, perm_sign, wedge
from .linalg import compound, identity, inertia, inverse, matmul, rank, rref
from .stable import decompose, lam

TRIPLES = basis(6, 3)
INDEX = {I: i for i, I in enumerate(TRIPLES)}
I_UNIT = S.Quad(0, 1, -1)
ONE = S.Quad(1, 0, -1)
ZERO = S.Quad(0, 0, -1)


class DegenerateRestriction(FormError):
    """gamma restricted to the proposed tangent space is degenerate."""


class WrongOrbit(FormError):
    """The three-vector lies outside the open orbit the construction needs."""


def gq(x) -> S.Quad:
    """Coerce to a Gaussian rational."""
    if isinstance(x, S.Quad):
        if x.d != -1:
            raise S.NotExact("expected a Gaussian rational")
        return x
    if isinstance(x, complex):
        return S.Quad(Fraction(x.real), Fraction(x.imag), -1)
    return S.Quad(x, 0, -1)


def vec(*entries) -> np.ndarray:
    """A vector of C^6 from six coefficients."""
    return np.array([gq(v) for v in entries], dtype=object)


def unit(i: int) -> np.ndarray:
    v = np.array([ZERO] * 6, dtype=object)
    v[i] = ONE
    return v


def wedge3(u, v, w) -> np.ndarray:
    """u ^ v ^ w in the triple basis."""
    out = np.array([ZERO] * 20, dtype=object)
    for n, I in enumerate(TRIPLES):
        acc = ZERO
        for perm, sgn in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                          ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1)):
            t = u[I[perm[0]]] * v[I[perm[1]]] * w[I[perm[2]]]
            acc = acc + t if sgn > 0 else acc - t
        out[n] = acc
    return out


def _conj_vec(v) -> np.ndarray:
    return np.array([S.conj(gq(x)) for x in v], dtype=object)


def top_pairing(v, w):
    """Coefficient of e_{123456} in v ^ w."""
    acc = ZERO
    for I in TRIPLES:
        J = tuple(sorted(set(range(6)) - set(I)))
        a, b = v[INDEX[I]], w[INDEX[J]]
        if a and b:
            acc = acc + a * b * perm_sign(I + J)
    return acc


def _pairing_matrix() -> np.ndarray:
    W = np.empty((20, 20), dtype=object)
    W[:, :] = ZERO
    for I in TRIPLES:
        J = tuple(sorted(set(range(6)) - set(I)))
        W[INDEX[I], INDEX[J]] = gq(perm_sign(I + J))
    return W


def _bilinear(A, v, w):
    acc = ZERO
    for i in range(20):
        if not v[i]:
            continue
        for j in range(20):
            if A[i, j] and w[j]:
                acc = acc + v[i] * A[i, j] * w[j]
    return acc


@dataclass
class ComplexSpace:
    """Lambda^3 C^6 with nu = nu_scale e_{123456} and either a Hermitian form on C^6
    (unitary real forms) or complex conjugation (the SL(6,R) case)."""
    h: tuple | None            # diagonal of <.,.> on C^6, or None for the SL(6,R) case
    nu_scale: S.Quad

    @property
    def hermitian_signature(self):
        return None if self.h is None else (sum(1 for x in self.h if x > 0), sum(1 for x in self.h if x < 0))

    def omega_matrix(self) -> np.ndarray:
        """Omega(v, w) = v^T W w with Omega(v, w) nu = v ^ w."""
        inv = 1 / self.nu_scale
        return _pairing_matrix() * inv

    def gamma_matrix(self) -> np.ndarray:
        """gamma(v, w) = v^T G conj(w)."""
        if self.h is None:
            return self.omega_matrix() * I_UNIT
        G = np.empty((20, 20), dtype=object)
        G[:, :] = ZERO
        for n, I in enumerate(TRIPLES):
            G[n, n] = gq(self.h[I[0]] * self.h[I[1]] * self.h[I[2]])
        return G

    def omega(self, v, w):
        return top_pairing(v, w) / self.nu_scale

    def gamma(self, v, w):
        return _bilinear(self.gamma_matrix(), v, _conj_vec(w))

    def tau_matrix(self) -> np.ndarray:
        """T with tau(v) = T conj(v), fixed by gamma(x, tau v) = i Omega(x, v)."""
        if self.h is None:
            return identity(20) * ONE
        Ginv = inverse(self.gamma_matrix())
        Gc = np.vectorize(S.conj, otypes=[object])(Ginv)
        return matmul(Gc, self.omega_matrix()) * (-I_UNIT)

    def tau(self, v) -> np.ndarray:
        return matmul(self.tau_matrix(), _conj_vec(v).reshape(20, 1)).reshape(20)

    def tau_square(self) -> int:
        """+1 for a real structure, -1 for a quaternionic one."""
        T = self.tau_matrix()
        Tc = np.vectorize(S.conj, otypes=[object])(T)
        sq = matmul(T, Tc)
        Id = identity(20) * ONE
        if all(a == b for a, b in zip(sq.flat, Id.flat)):
            return 1
        if all(a == -b for a, b in zip(sq.flat, Id.flat)):
            return -1
        raise FormError("tau^2 is not +-Id")


def unitary_space(p: int, q: int) -> ComplexSpace:
    """C^{p,q} with <e_i, e_i> = 1 (i <= p), -1 afterwards; nu = e_{123456}."""
    if p + q != 6:
        raise ValueError("p + q must be 6")
    return ComplexSpace(tuple([1] * p + [-1] * q), ONE)


def printed_basis(p: int, q: int) -> list:
    """The ordered bases in which gamma = diag(1_10, -1_10) and Omega = [[0, 1], [-1, 0]]."""
    if (p, q) == (3, 3):
        vs = {f"e{j + 1}": unit(j) for j in range(3)} | {f"f{j + 1}": unit(j + 3) for j in range(3)}
        words = ["e1e2e3", "e1f1f2", "e1f1f3", "e1f2f3", "e2f1f2", "e2f1f3", "e2f2f3", "e3f1f2", "e3f1f3", "e3f2f3",
                 "f1f2f3", "e2e3f3", "-e2e3f2", "e2e3f1", "-e1e3f3", "e1e3f2", "-e1e3f1", "e1e2f3", "-e1e2f2", "e1e2f1"]
    elif (p, q) == (5, 1):
        vs = {f"e{j + 1}": unit(j) for j in range(5)} | {"f": unit(5)}
        words = ["e1e2e3", "e1e2e4", "e1e2e5", "e1e3e4", "e1e3e5", "e1e4e5", "e2e3e4", "e2e3e5", "e2e4e5", "e3e4e5",
                 "e4e5f", "-e3e5f", "e3e4f", "e2e5f", "-e2e4f", "e2e3f", "-e1e5f", "e1e4f", "-e1e3f", "e1e2f"]
    else:
        raise ValueError("printed bases exist for (3,3) and (5,1) only")
    return [_named(vs, w) for w in words]


def matrices_in_basis(space: ComplexSpace, B: list) -> tuple:
    """(gamma[i, j], Omega[i, j]) on the vectors B."""
    n = len(B)
    G = np.empty((n, n), dtype=object)
    W = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            G[i, j] = space.gamma(B[i], B[j])
            W[i, j] = space.omega(B[i], B[j])
    return G, W


def gamma_signature(space: ComplexSpace) -> tuple:
    pos, neg, zero = inertia(space.gamma_matrix(), hermitian=True)
    return pos, neg


def _decomposable_vectors_gamma(space: ComplexSpace, vs, ws):
    """det(<v_i, w_j>) for the unitary case."""
    if space.h is None:
        raise ValueError("the determinant formula needs a Hermitian form on C^6")
    M = [[sum((v[k] * S.conj(w[k]) * space.h[k] for k in range(6)), ZERO) for w in ws] for v in vs]
    a, b, c = M
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


# ---------------------------------------------------------------------------
# restricted signatures on orbit tangent spaces

@dataclass
class OrbitCase:
    group: str
    space: ComplexSpace
    base: tuple                 # three vectors spanning the base point
    tangent: list               # ordered tangent basis
    labels: list

    @property
    def point(self):
        return wedge3(*self.base)


def orbit_tangent_span(base) -> np.ndarray:
    """Rows spanning the tangent space of the cone at v1 ^ v2 ^ v3 (gl(6, C) acting)."""
    rows = []
    v = list(base)
    for a in range(6):
        for b in range(6):
            parts = []
            for j in range(3):
                w = list(v)
                img = np.array([ZERO] * 6, dtype=object)
                img[a] = v[j][b]
                w[j] = img
                parts.append(wedge3(*w))
            rows.append(parts[0] + parts[1] + parts[2])
    return np.array(rows, dtype=object)


def tangent_check(case: OrbitCase) -> bool:
    """Every listed vector lies in the linearized orbit, and they span it."""
    span = orbit_tangent_span(case.base)
    r0 = rank(span)
    both = np.vstack([span, np.array(case.tangent, dtype=object)])
    return r0 == len(case.tangent) == rank(both) == rank(np.array(case.tangent, dtype=object))


def restricted_gamma(case: OrbitCase) -> np.ndarray:
    T = case.tangent
    n = len(T)
    H = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            H[i, j] = case.space.gamma(T[i], T[j])
    return H


def orbit_signature(case: OrbitCase) -> dict:
    H = restricted_gamma(case)
    pos, neg, zero = inertia(H, hermitian=True)
    if zero:
        raise DegenerateRestriction(f"gamma has a {zero}-dimensional kernel on the tangent space")
    gpp = case.space.gamma(case.point, case.point)
    s = S.sign(gq(gpp).a)
    proj = (pos - 1, neg) if s > 0 else (pos, neg - 1)
    return {"group": case.group, "basePoint": case.labels[0], "tangentSignature": [pos, neg],
            "projectiveSignature": list(proj), "gammaPP": S.format_exact(gpp)}


def _named(vectors: dict, word: str):
    """'e12^fb3' style: concatenated names of basis vectors, '-' prefix for a sign."""
    sgn = -1 if word.startswith("-") else 1
    word = word.lstrip("-")
    names = []
    i = 0
    keys = sorted(vectors, key=len, reverse=True)
    while i < len(word):
        for k in keys:
            if word.startswith(k, i):
                names.append(k)
                i += len(k)
                break
        else:
            raise ValueError(f"cannot parse {word!r}")
    v = wedge3(*(vectors[n] for n in names))
    return v * gq(sgn) if sgn < 0 else v


def _case(group, space, vectors, base, words):
    tangent = [_named(vectors, w) for w in words]
    return OrbitCase(group, space, tuple(vectors[n] for n in base), tangent, words)


def sl6_case() -> OrbitCase:
    """E = span(E_j + i F_j), nu = i e_123 ^ conj(e_123)."""
    vs = {}
    for j in range(3):
        vs[f"e{j + 1}"] = unit(j) + unit(j + 3) * I_UNIT
        vs[f"b{j + 1}"] = unit(j) - unit(j + 3) * I_UNIT      # conjugates
    p = wedge3(vs["e1"], vs["e2"], vs["e3"])
    nu = top_pairing(p, _conj_vec(p)) * I_UNIT
    space = ComplexSpace(None, nu)
    words = ["e1e2e3", "e1e2b3", "e1e3b2", "e2e3b1", "e1e2b1", "e1e3b1", "e1e2b2", "-e2e3b3", "e2e3b2", "e1e3b3"]
    return _case("SL(6,R)", space, vs, ("e1", "e2", "e3"), words)


def su33_cases() -> list:
    vs = {f"e{j + 1}": unit(j) for j in range(3)} | {f"f{j + 1}": unit(j + 3) for j in range(3)}
    space = unitary_space(3, 3)
    c1 = _case("SU(3,3)", space, vs, ("e1", "e2", "e3"),
               ["e1e2e3", "f1e2e3", "f1e1e3", "f1e1e2", "f2e2e3", "f2e1e3", "f2e1e2", "f3e2e3", "f3e1e3", "f3e1e2"])
    c2 = _case("SU(3,3)", space, vs, ("e1", "e2", "f1"),
               ["e1e2f1", "e1f1f2", "e2f1f2", "e2f1f3", "e1f1f3", "e1e2e3", "e1e3f1", "e2e3f1", "e1e2f2", "e1e2f3"])
    return [c1, c2]


def su51_case() -> OrbitCase:
    vs = {f"e{j + 1}": unit(j) for j in range(5)} | {"f": unit(5)}
    space = unitary_space(5, 1)
    words = ["e1e2e3", "e2e3e4", "e2e3e5", "e1e3e4", "e1e3e5", "e1e2e4", "e1e2e5", "e1e2f", "e1e3f", "e2e3f"]
    return _case("SU(5,1)", space, vs, ("e1", "e2", "e3"), words)


def mat_equ() -> np.ndarray:
    """1, -1_3 and a hyperbolic 6x6 block: gamma on the printed tangent bases."""
    M = np.zeros((10, 10), dtype=int)
    M[0, 0] = 1
    for i in range(3):
        M[1 + i, 1 + i] = -1
        M[4 + i, 7 + i] = M[7 + i, 4 + i] = 1
    return M


# ---------------------------------------------------------------------------
# para-complex picture: the open orbit {lambda > 0} in Lambda^3 R^6

def _sym_matrix() -> np.ndarray:
    """omega(a, b) = coefficient of e_{123456} in a ^ b on Lambda^3 R^6."""
    W = np.empty((20, 20), dtype=object)
    W[:, :] = Fraction(0)
    for I in TRIPLES:
        J = tuple(sorted(set(range(6)) - set(I)))
        W[INDEX[I], INDEX[J]] = Fraction(perm_sign(I + J))
    return W


def split(psi: KForm) -> tuple:
    """(psi+, psi-, f) with psi = psi+ + psi-, both decomposable and psi+ ^ psi- = f e_{123456}, f > 0."""
    if S.sign(lam(psi)) <= 0:
        raise WrongOrbit("lambda(psi) must be positive")
    _, a, b = decompose(psi)
    f = wedge(a, b).top_coeff()
    if S.sign(f) < 0:
        a, b, f = b, a, -f
    return a, b, f


def hamiltonian_field(psi: KForm) -> KForm:
    """X_f(psi) = psi+ - psi-."""
    a, b, _ = split(psi)
    return a - b


def support(v: KForm) -> np.ndarray:
    """Rows spanning {alpha -| v} for a decomposable three-vector v."""
    rows = []
    for i, j in combinations(range(6), 2):
        row = []
        for k in range(6):
            if k in (i, j):
                row.append(Fraction(0) if v.exact else 0.0)
                continue
            T = tuple(sorted((i, j, k)))
            row.append(v.c[INDEX[T]] * perm_sign((i, j, k)))
        rows.append(row)
    if not v.exact:
        raise FormError("support needs exact coefficients")
    R = rref(np.array(rows, dtype=object))[0]
    nz = [r for r in R if any(x for x in r)]
    if len(nz) != 3:
        raise WrongOrbit("three-vector is not decomposable")
    return np.array(nz, dtype=object)


def para_J(psi: KForm) -> np.ndarray:
    """+1 on Lambda^3 E+ + Lambda^2 E+ ^ E-, -1 on the mirror (E+- the supports of psi+-)."""
    a, b, _ = split(psi)
    U = np.vstack([support(a), support(b)]).T          # columns: basis of E+ then E-
    C = compound(U, 3)
    D = np.diag([Fraction(1) if sum(1 for i in I if i < 3) >= 2 else Fraction(-1) for I in TRIPLES]).astype(object)
    return matmul(matmul(C, D), inverse(C))


def para_J_linearized(psi: KForm) -> np.ndarray:
    """Columns d/ds X_f(psi + s e_I) at s = 0, computed exactly with dual numbers."""
    cols = []
    for j in range(20):
        c = np.array([S.Dual(x, Fraction(1) if i == j else Fraction(0)) for i, x in enumerate(psi.c)], dtype=object)
        X = hamiltonian_field(KForm(6, 3, c))
        cols.append([x.b if isinstance(x, S.Dual) else Fraction(0) for x in X.c])
    return np.array(cols, dtype=object).T


@dataclass
class ParaKahlerPoint:
    psi: KForm
    plus: KForm
    minus: KForm
    f: object
    J: np.ndarray
    g: np.ndarray

    def as_dict(self) -> dict:
        from .exterior import to_literal
        return {"psi": to_literal(self.psi), "psiPlus": to_literal(self.plus), "psiMinus": to_literal(self.minus),
                "f": S.format_scalar(self.f), "signature": list(inertia(self.g)[:2])}


def para_structure(psi: KForm, cross_check: bool = False) -> ParaKahlerPoint:
    a, b, f = split(psi)
    J = para_J(psi)
    if cross_check:
        Ja = para_J_linearized(psi)
        if any(x != y for x, y in zip(J.flat, Ja.flat)):
            raise FormError("the two constructions of J disagree")
    g = matmul(J.T, _sym_matrix())
    return ParaKahlerPoint(psi, a, b, f, J, g)


def omega_skew_residual(J: np.ndarray) -> bool:
    """omega(J., J.) = -omega, exactly."""
    W = _sym_matrix()
    lhs = matmul(matmul(J.T, W), J)
    return all(x == -y for x, y in zip(lhs.flat, W.flat))


# para-complex three-vectors as pairs (real part, e-part) -----------------

@dataclass
class ParaVector:
    re: KForm
    ep: KForm

    def __add__(self, o):
        return ParaVector(self.re + o.re, self.ep + o.ep)

    def __neg__(self):
        return ParaVector(-self.re, -self.ep)

    def conj(self):
        return ParaVector(self.re, -self.ep)

    def wedge(self, o) -> "ParaVector":
        return ParaVector(wedge(self.re, o.re) + wedge(self.ep, o.ep), wedge(self.re, o.ep) + wedge(self.ep, o.re))


def para_unit(i: int, eps_part: int = 0) -> ParaVector:
    z = KForm.zero(6, 1)
    return ParaVector(KForm.from_terms(6, [((i,), Fraction(1))]) if eps_part == 0 else z,
                      KForm.from_terms(6, [((i,), Fraction(1))]) if eps_part else z)


def _pmul(x, y):
    return (x[0] * y[0] + x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _pdiv(x, y):
    n = y[0] * y[0] - y[1] * y[1]
    if not n:
        raise ZeroDivisionError("para-complex zero divisor")
    return _pmul(x, (y[0] / n, -y[1] / n))


def _ptop(v: ParaVector):
    return (v.re.top_coeff(), v.ep.top_coeff())


@dataclass
class ParaCase:
    nu: tuple                  # para-complex coefficient of e_{123456}
    u: list                    # u_i = e_i + e f_i
    ubar: list

    def omega(self, v: ParaVector, w: ParaVector):
        return _pdiv(_ptop(v.wedge(w)), self.nu)

    def gamma(self, v: ParaVector, w: ParaVector):
        """gamma = e Omega(., tau .), tau the para-complex conjugation."""
        return _pmul((0, 1), self.omega(v, w.conj()))

    def wedge3(self, a, b, c) -> ParaVector:
        return a.wedge(b).wedge(c)


def para_case() -> ParaCase:
    u, ub = [], []
    for i in range(3):
        e, f = para_unit(i), para_unit(i + 3, 1)
        u.append(ParaVector(e.re, f.ep))
        ub.append(ParaVector(e.re, -f.ep))
    p = u[0].wedge(u[1]).wedge(u[2])
    pb = p.conj()
    nu = _pmul((0, 1), _ptop(p.wedge(pb)))
    return ParaCase(nu, u, ub)


def para_tangent(pc: ParaCase) -> list:
    u, b = pc.u, pc.ubar
    w = pc.wedge3
    return [w(u[0], u[1], u[2]), w(b[0], u[1], u[2]), w(b[1], u[2], u[0]), w(b[2], u[0], u[1]),
            w(b[1], u[1], u[2]), w(b[1], u[0], u[1]), w(b[2], u[1], u[2]), w(b[0], u[0], u[2]),
            w(b[2], u[0], u[2]), -w(b[0], u[0], u[1])]


def real_points_projection(v):
    """Re(v) for a ParaVector or a Gaussian-rational coefficient array."""
    if isinstance(v, ParaVector):
        return v.re
    if isinstance(v, KForm):
        return v
    return KForm(6, 3, np.array([gq(x).a for x in v], dtype=object))
