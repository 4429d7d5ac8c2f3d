"""Named half-flat structures on h3 + h3 with their expected metrics.

Metric strings use ``c*x.y`` for the symmetric product x.y = (x(x)y + y(x)x)/2,
so ``x.x`` is (x)^2.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import scalars as S
from .exterior import KForm, parse_form
from .lie import omega_normal

_NAMES = {"e1": 0, "e2": 1, "e3": 2, "f1": 3, "f2": 4, "f3": 5,
          "e4": 3, "e5": 4, "e6": 5}


def parse_metric(text: str, n: int = 6, mode: str = "exact") -> np.ndarray:
    g = np.empty((n, n), dtype=object if mode == "exact" else float)
    g[:, :] = Fraction(0) if mode == "exact" else 0.0
    t = text.replace(" ", "")
    for m in re.finditer(r"([+-]?)([^+-]*?)\*?([ef]\d)\.([ef]\d)", t):
        sgn, coef, x, y = m.groups()
        c = S.parse_scalar(coef, mode) if coef else (Fraction(1) if mode == "exact" else 1.0)
        if sgn == "-":
            c = -c
        i, j = _NAMES[x], _NAMES[y]
        if i == j:
            g[i, i] += c
        else:
            half = c * Fraction(1, 2) if mode == "exact" else c / 2
            g[i, j] += half
            g[j, i] += half
    return g


def _f(text, scale=None):
    r = parse_form(text, 6)
    return r * scale if scale is not None else r


R2 = S.Quad(0, 1, 2)
HALF_R2 = S.Quad(0, Fraction(1, 2), 2)


@dataclass
class Example:
    name: str
    omega: KForm
    rho: KForm
    label: str
    metric: np.ndarray | None = None


def ex1() -> Example:
    rho = _f("e123 - f123 - e1f23 + e23f1 - e2f31 + e31f2 - e3f12 + e12f3", HALF_R2)
    return Example("ex1", omega_normal(1), rho, "SU(3)", parse_metric("e1.e1+e2.e2+e3.e3+f1.f1+f2.f2+f3.f3"))


def ex2() -> Example:
    rho = _f("e123 - f123 - e1f23 + e23f1 + e2f31 - e31f2 + e3f12 - e12f3", HALF_R2)
    return Example("ex2", omega_normal(1), rho, "SU(1,2)", parse_metric("e1.e1-e2.e2-e3.e3+f1.f1-f2.f2-f3.f3"))


def ex3() -> Example:
    return Example("ex3", omega_normal(1), _f("e123 + f123", R2), "SL(3,R)",
                   parse_metric("2*e1.f1 + 2*e2.f2 + 2*e3.f3"))


def kappa_examples():
    return [ex1(), ex2(), ex3()]


def rigidity_examples(beta=Fraction(1)):
    """The eight half-flat structures with omega of orbit type 2..5 (vanishing kappa_1 part).

    Each row pairs rho with the omega it is actually compatible with; the
    omega_3 and omega_5 rows are therefore swapped relative to the usual
    listing. Split-signature metrics are stored with the sign produced by
    the orientation omega^3 (see ``pair_analyze``).
    """
    b = beta
    out = []
    # SU(1,2)
    rho = _f("e12f3 + e1f23 + e23f1 - e3f12") + _f("e13f2 + f123", R2)
    out.append(Example("su12-w2", omega_normal(2), rho, "SU(1,2)", parse_metric(
        "-e2.e2 - f2.f2 + 2*e1.e3 - 2sqrt2*e1.f3 + 2sqrt2*e3.f1 - 2*f1.f3")))
    rho = _f("e12f3 + e13f2 - e1f23 + e23f1 - e3f12 + f123")
    out.append(Example("su12-w3", omega_normal(3), rho, "SU(1,2)", parse_metric(
        "-e2.e2 - 2*f2.f2 + 2*e1.e3 + 2*e2.f2 + 2*f1.f3")))
    rho = (_f("e12f3 - e13f2 + e1f23 - e3f12") * b + _f("e23f1") * ((b + 1) / b ** 3)
           + _f("e2f13") * ((b ** 4 - b - 1) / b ** 3) - _f("f123") * (b * b + 2 * b))
    out.append(Example("su12-w4", omega_normal(4, b), rho, "SU(1,2)", _metric_beta_su12(b)))
    rho = _f("e123 + e12f3 + e13f2 + e1f12 - 2*e1f23 + e2f13 - e3f12")
    out.append(Example("su12-w5", omega_normal(5), rho, "SU(1,2)", parse_metric(
        "-e2.e2 - 2*f2.f2 + 2*e1.f1 + 2*e1.f3 + 2*e2.f2 - 2*e3.f1 - 2*f1.f3")))
    # SL(3,R)
    out.append(Example("sl3-w2", omega_normal(2), _f("e1f23 + e23f1", R2), "SL(3,R)", parse_metric(
        "-2*e1.e3 + 2*e2.f2 + 2*f1.f3")))
    out.append(Example("sl3-w3", omega_normal(3), _f("e123 + f123", R2), "SL(3,R)", parse_metric(
        "-2*e1.f3 - 2*e2.f2 - 2*e3.f1")))
    s = S.exact_sqrt(2 * b + 2)
    if s is None:
        s = S.sqrt_any(2 * b + 2)
    rho = _f("e12f3 - e1f23 + e2f13 - e3f12")
    rho = rho * (-s) if S.is_exact(s) else rho.to_float() * (-float(s))
    g = parse_metric("2*f2.f2 - 2*e1.e3 - 2*e1.f3 - 2*e2.f2 + 2*e3.f1")
    g[3, 5] = g[5, 3] = (2 * b + 4) / 2
    out.append(Example("sl3-w4", omega_normal(4, b), rho, "SL(3,R)", g))
    out.append(Example("sl3-w5", omega_normal(5), _f("e12f3 + e13f2 + e1f12 - e3f12", R2), "SL(3,R)",
                       parse_metric("2*e1.e1 - 2*e1.e3 + 2*e1.f3 - 2*e2.f2 + 2*f1.f3")))
    return out


def _metric_beta_su12(b):
    g = np.empty((6, 6), dtype=object)
    g[:, :] = Fraction(0)
    g[1, 1] = -1 / (b * b)
    g[4, 4] = -b * b
    g[0, 5] = g[5, 0] = b * b
    g[2, 3] = g[3, 2] = -(b + 1) / (b * b)
    g[3, 5] = g[5, 3] = -(b ** 4 + b + 1) / (b * b)
    return g


def _sym(n=6):
    g = np.empty((n, n), dtype=object)
    g[:, :] = Fraction(0)
    return g


def printed_kappa_metric(name: str, x):
    """g(x) for the kappa families of ex1, ex2, ex3 as closed expressions in x and kappa(x)."""
    r2 = R2
    g = _sym()

    def put(i, j, v):
        if i == j:
            g[i, i] += v
        else:
            g[i, j] += v / 2
            g[j, i] += v / 2

    if name == "ex1":
        k = (x - r2) ** 3 * (x + r2)
        c = 1 - HALF_R2 * x
        for i, v in zip(range(6), (1, 1, -4 / k, 1, 1, -4 / k)):
            put(i, i, c * v)
        for i, j, v in ((0, 3, 1), (1, 4, 1), (2, 5, 4 / k)):
            put(i, j, r2 * x * c * v)
    elif name == "ex2":
        k = (x - r2) * (x + r2) ** 3
        c = 1 + HALF_R2 * x
        for i, v in zip(range(6), (1, -1, 4 / k, 1, -1, 4 / k)):
            put(i, i, c * v)
        for i, j, v in ((0, 3, 1), (1, 4, 1), (2, 5, 4 / k)):
            put(i, j, -r2 * x * c * v)
    elif name == "ex3":
        k = (2 + x * x) ** 2
        put(0, 3, 2 + x * x)
        put(1, 4, 2 + x * x)
        put(2, 5, 4 * (2 - x * x) / k)
        put(2, 2, 4 * r2 * x / k)
        put(5, 5, -4 * r2 * x / k)
    else:
        raise KeyError(name)
    return g
