"""Univariate polynomials over exact fields, stored low degree first."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import scalars as S


def trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def degree(p) -> int:
    return len(trim(p)) - 1


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p, c):
    return trim([c * a for a in p])


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def deriv(p):
    return trim([i * p[i] for i in range(1, len(p))])


def divmod_(p, q):
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    quo = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    lead = q[-1]
    while len(r) >= len(q) and r:
        c = r[-1] / lead
        k = len(r) - len(q)
        quo[k] = c
        for i, b in enumerate(q):
            r[i + k] = r[i + k] - c * b
        r = trim(r[:-1]) if not r[-1] else trim(r)
    return trim(quo), r


def from_roots(roots, lead=1):
    p = [lead]
    for r in roots:
        p = mul(p, [-r, 1])
    return p


def interpolate(xs, ys):
    """Lagrange interpolation through exact points."""
    out = []
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        den = 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = mul(basis, [-xj, 1])
                den = den * (xi - xj)
        out = add(out, scale(basis, yi / den))
    return out


def equal(p, q) -> bool:
    return not add(p, scale(q, -1))


def to_string(p, var: str = "x") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        cs = S.format_scalar(c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono:
            cs = "" if cs == "1" else ("-" if cs == "-1" else f"({cs})*" if any(ch in cs[1:] for ch in "+-") else f"{cs}*")
        terms.append(cs + mono if mono else f"({cs})" if any(ch in cs[1:] for ch in "+-") else cs)
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


# ---------------------------------------------------------------------------
# real roots

def sturm_sequence(p) -> list:
    seq = [trim(p), deriv(p)]
    while seq[-1] and degree(seq[-1]) > 0:
        _, r = divmod_(seq[-2], seq[-1])
        if not r:
            break
        seq.append(scale(r, -1))
    return seq


def _sign_at(p, x) -> int:
    return S.sign(evaluate(p, x))


def _sign_at_inf(p, plus: bool) -> int:
    p = trim(p)
    s = S.sign(p[-1])
    return s if plus or degree(p) % 2 == 0 else -s


def _changes(signs) -> int:
    s = [v for v in signs if v]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def count_roots(seq, lo=None, hi=None) -> int:
    """Distinct real roots in (lo, hi]; None means infinity."""
    a = _changes([_sign_at_inf(p, False) if lo is None else _sign_at(p, lo) for p in seq])
    b = _changes([_sign_at_inf(p, True) if hi is None else _sign_at(p, hi) for p in seq])
    return a - b


def cauchy_bound(p) -> Fraction:
    p = trim(p)
    lead = abs(S.to_float(p[-1]))
    m = max(abs(S.to_float(c)) for c in p[:-1]) if len(p) > 1 else 0.0
    return Fraction(math.ceil(1 + m / lead) + 1)


def isolate_roots(p, width=Fraction(1, 2 ** 40)) -> list:
    """Disjoint rational intervals (lo, hi], each holding exactly one real root."""
    seq = sturm_sequence(p)
    B = cauchy_bound(p)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1 and hi - lo <= width:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def _field_d(p):
    for c in p:
        if isinstance(c, S.Quad):
            return c.d
    return None


def recognize_root(p, approx: float, max_den: int = 10 ** 4):
    """Try to write a root near approx as an exact rational or a + b sqrt d."""
    d = _field_d(p) or 2
    q = Fraction(approx).limit_denominator(max_den)
    if not evaluate(p, q):
        return q
    if d < 0:
        return None
    rd = math.sqrt(d)
    for den in range(1, 49):
        for bnum in range(-6 * den, 6 * den + 1):
            b = Fraction(bnum, den)
            if b == 0:
                continue
            a = Fraction(approx - float(b) * rd).limit_denominator(max_den)
            cand = S.Quad(a, b, d)
            if abs(float(cand) - approx) < 1e-9 and not evaluate(p, cand):
                return cand
    return None


def real_roots(p, exact: bool = True) -> list:
    """Real roots in increasing order: exact when recognisable, floats otherwise."""
    out = []
    for lo, hi in isolate_roots(p):
        approx = float((lo + hi) / 2)
        r = recognize_root(p, approx) if exact else None
        out.append(r if r is not None else approx)
    return out


def float_roots(p, cluster: float = 1e-10) -> list:
    """Companion-matrix real roots with clustering of near-equal values."""
    c = [S.to_float(x) for x in trim(p)]
    ev = np.roots(c[::-1])
    re = sorted(float(z.real) for z in ev if abs(z.imag) <= 1e-7 * max(1.0, abs(z)))
    out = []
    for r in re:
        if out and abs(r - out[-1][-1]) <= max(cluster, 1e-6 * max(1.0, abs(r))):
            out[-1].append(r)
        else:
            out.append([r])
    return [sum(g) / len(g) for g in out]
