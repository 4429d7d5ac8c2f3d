"""Small linear algebra over exact fields (object arrays) and floats."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from . import scalars as S


def is_exact_matrix(A) -> bool:
    return np.asarray(A).dtype == object


def to_object(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype == object:
        return A
    out = np.empty(A.shape, dtype=object)
    for ix, v in np.ndenumerate(A):
        out[ix] = Fraction(int(v)) if float(v).is_integer() else Fraction(v)
    return out


def frac_matrix(rows) -> np.ndarray:
    rows = [[S.parse_scalar(x) if isinstance(x, str) else (Fraction(x) if isinstance(x, int) else x)
             for x in r] for r in rows]
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = v
    return out


def identity(n: int, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.eye(n)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = Fraction(int(i == j))
    return out


@lru_cache(maxsize=None)
def _perm_terms(k: int):
    out = []
    for p in permutations(range(k)):
        s = 1
        for i in range(k):
            for j in range(i + 1, k):
                if p[i] > p[j]:
                    s = -s
        out.append((p, s))
    return tuple(out)


def _det_leibniz(M):
    k = len(M)
    if k == 0:
        return Fraction(1)
    tot = 0
    for p, s in _perm_terms(k):
        prod = M[0][p[0]]
        for i in range(1, k):
            if not prod:
                break
            prod = prod * M[i][p[i]]
        if prod:
            tot = tot + prod if s > 0 else tot - prod
    return tot


def det(A):
    A = np.asarray(A)
    n = A.shape[0]
    if A.dtype != object:
        return float(np.linalg.det(A)) if not np.iscomplexobj(A) else complex(np.linalg.det(A))
    if n <= 4:
        return _det_leibniz(A.tolist())
    M = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in A.tolist()]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = 1 / M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] * inv
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return d


@lru_cache(maxsize=None)
def _minor_index(n: int, m: int, k: int):
    rows = np.array(list(combinations(range(n), k)), dtype=np.intp).reshape(-1, k)
    cols = np.array(list(combinations(range(m), k)), dtype=np.intp).reshape(-1, k)
    return rows, cols


def compound(A, k: int) -> np.ndarray:
    """k-th compound matrix: C[I, J] = det A[I, J] over lexicographic k-subsets."""
    A = np.asarray(A)
    n, m = A.shape
    if k == 0:
        return identity(1, A.dtype == object) if A.dtype == object else np.ones((1, 1))
    rows, cols = _minor_index(n, m, k)
    if A.dtype != object:
        sub = A[rows[:, None, :, None], cols[None, :, None, :]]
        return np.linalg.det(sub)
    out = np.empty((len(rows), len(cols)), dtype=object)
    L = A.tolist()
    for a, I in enumerate(rows):
        for b, J in enumerate(cols):
            out[a, b] = det(np.array([[L[i][j] for j in J] for i in I], dtype=object)) if k > 4 else \
                _det_leibniz([[L[i][j] for j in J] for i in I])
    return out


def rref(A):
    """Reduced row echelon form over an exact field. Returns (R, pivots)."""
    M = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in np.asarray(A, dtype=object).tolist()]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return M, piv


def rank(A, tol: float | None = None) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    if A.dtype != object:
        return int(np.linalg.matrix_rank(A, tol=tol))
    return len(rref(A)[1])


def nullspace(A) -> list:
    """Exact basis of {x : A x = 0} as lists."""
    A = np.asarray(A, dtype=object)
    cols = A.shape[1]
    R, piv = rref(A)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve(A, b):
    """Exact solution of a square or consistent system, or None."""
    A = np.asarray(A, dtype=object)
    aug = np.concatenate([A, np.asarray(b, dtype=object).reshape(-1, 1)], axis=1)
    R, piv = rref(aug)
    n = A.shape[1]
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return x


def inverse(A):
    A = np.asarray(A)
    n = A.shape[0]
    if A.dtype != object:
        return np.linalg.inv(A)
    aug = np.concatenate([A, identity(n)], axis=1)
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return np.array([r[n:] for r in R], dtype=object)


def matmul(A, B):
    return np.asarray(A).dot(np.asarray(B))


def inertia(G, hermitian: bool = False):
    """Exact (n+, n-, n0) of a symmetric or Hermitian matrix by congruence pivoting.

    A Hermitian A + iB is handled through the real symmetric [[A, -B], [B, A]],
    whose inertia is twice that of the original.
    """
    G = np.asarray(G, dtype=object)
    if hermitian:
        n = G.shape[0]
        re = [[x.a if isinstance(x, S.Quad) else x for x in r] for r in G.tolist()]
        im = [[x.b if isinstance(x, S.Quad) else 0 for x in r] for r in G.tolist()]
        big = [re[i] + [-v for v in im[i]] for i in range(n)] + [im[i] + re[i] for i in range(n)]
        p, q, z = inertia(np.array(big, dtype=object))
        return p // 2, q // 2, z // 2
    M = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in G.tolist()]
    n = len(M)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if M[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and M[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j makes the diagonal entry 2 M[i][j] nonzero
            for r in range(n):
                M[r][i] = M[r][i] + M[r][j]
            for c in range(n):
                M[i][c] = M[i][c] + M[j][c]
            piv = i
        d = M[piv][piv]
        if S.sign(d) > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        inv = 1 / d
        for i in active:
            if M[i][piv]:
                f = M[i][piv] * inv
                for j in active:
                    M[i][j] = M[i][j] - f * M[piv][j]
    return pos, neg, n - pos - neg


def float_signature(G, gap: float = 1e-7):
    """Signature from eigenvalue signs; raises when an eigenvalue is within gap of zero."""
    G = np.asarray(G, dtype=complex if np.iscomplexobj(G) else float)
    ev = np.linalg.eigvalsh(G)
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.any(np.abs(ev) < gap * scale):
        raise ArithmeticError("eigenvalue too close to zero for a reliable signature")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))
