from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitchin_lab import scalars as S
from hitchin_lab.exterior import (DegreeError, DimensionMismatch, FormError, KForm, form_to_json, hodge,
                                  interior, kappa_dual, parse_form, parse_form_json, pullback, to_literal,
                                  top_form, wedge)
from hitchin_lab.linalg import det, identity, matmul
from hitchin_lab.stable import g2_normal, g2_structure, normal_pair, pair_analyze

from strategies import forms, matrices, vectors


def f(text, n=6):
    return parse_form(text, n)


def test_wedge_basis():
    assert wedge(f("e1"), f("e2")) == f("e12")


def test_wedge_square_of_odd_form_vanishes():
    # the two cross terms e123^e456 and e456^e123 cancel in odd degree
    a = f("e123 + e456")
    assert wedge(a, a) == KForm.zero(6, 6)
    assert wedge(f("e123"), f("e456")) == f("e123456")


def test_wedge_square_of_two_form():
    b = f("e12 + e34")
    assert wedge(b, b) == f("e1234") * 2


def test_wedge_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        wedge(f("e1", 6), f("e1", 7))


def test_interior_basis():
    e1 = np.array([1, 0, 0, 0, 0, 0], dtype=object)
    assert interior(e1, f("e12")) == f("e2", 6)


def test_interior_of_zero_form_rejected():
    with pytest.raises(DegreeError):
        interior(np.array([1, 0], dtype=object), KForm.zero(2, 0))


def test_e7_into_g2_normal_form():
    phi = g2_normal(-1, 1)
    e7 = np.array([0] * 6 + [1], dtype=object)
    assert interior(e7, phi) == f("e12 + e34 + e56", 7)


def test_kappa_dual_basis_duality():
    w = kappa_dual(f("e12345"))
    assert w.kind == "vector"
    # w -| e^{1..6} = e^{12345}
    from hitchin_lab.exterior import contract
    assert contract(w, top_form(6)) == f("e12345")


def test_kappa_dual_roundtrip():
    from hitchin_lab.exterior import contract
    a = f("e135 - e146 - e236 - e245")
    assert contract(kappa_dual(a), top_form(6)) == a


def test_K_of_rho_minus_points_along_minus_e2():
    from hitchin_lab.stable import K_matrix
    K = K_matrix(f("e135 - e146 - e236 - e245"))
    assert list(K[:, 0]) == [0, -2, 0, 0, 0, 0]


def test_pullback_identity_and_homogeneity():
    rho = f("e135 - e146 - e236 - e245")
    assert pullback(identity(6), rho) == rho
    s = Fraction(3, 2)
    assert pullback(identity(6) * s, rho) == rho * s ** 3


def test_pullback_top_degree_scales_by_det():
    A = np.array([[Fraction(i + j * j + (i == j)) for j in range(6)] for i in range(6)], dtype=object)
    assert pullback(A, top_form(6)) == top_form(6) * det(A)


def test_hodge_of_normal_omega():
    om, rho = normal_pair(-1, 1)
    p = pair_analyze(om, rho)
    assert hodge(om, p.g, 1) == wedge(om, om) * Fraction(1, 2)


@pytest.mark.parametrize("eps,tau", [(-1, 1), (1, 1), (-1, -1)])
def test_hodge_dual_of_g2_normal_form(eps, tau):
    G = g2_structure(g2_normal(eps, tau))
    expected = (f("e3456 + e1256", 7) * (-eps * tau) - f("e1234", 7) * eps + f("e2467", 7) * eps
                + f("e2357 + e1457 + e1367", 7))
    assert G.star_phi() == expected


def test_hodge_of_one_is_volume():
    g = np.diag([Fraction(1)] * 6).astype(object)
    assert hodge(KForm(6, 0, np.array([Fraction(1)], dtype=object)), g) == top_form(6)


def test_literal_roundtrip_and_json():
    a = parse_form("e135 - 1/2*e146 + 2*e236", 6)
    assert parse_form(to_literal(a), 6) == a
    assert parse_form_json(form_to_json(a), 6) == a
    b = parse_form_json('[{"idx":[1,2,3],"c":"1+1*sqrt2"}]', 6)
    assert b[(0, 1, 2)] == S.Quad(1, 1, 2)


def test_bad_literal():
    with pytest.raises(FormError):
        parse_form("e1x2", 6)


# ---------------------------------------------------------------------------
# properties

@settings(max_examples=60, deadline=None)
@given(forms(6, 1), forms(6, 2), forms(6, 2))
def test_wedge_associative(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_graded_anticommutative(k, l, data):
    a = data.draw(forms(6, k))
    b = data.draw(forms(6, l))
    assert wedge(a, b) == wedge(b, a) * (-1) ** (k * l)


@settings(max_examples=60, deadline=None)
@given(vectors(6), forms(6, 2), forms(6, 2))
def test_interior_is_antiderivation(v, a, b):
    lhs = interior(v, wedge(a, b))
    rhs = wedge(interior(v, a), b) + wedge(a, interior(v, b))
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(matrices(6), matrices(6), forms(6, 3))
def test_pullback_is_contravariant(A, B, a):
    assert pullback(matmul(A, B), a) == pullback(B, pullback(A, a))


@settings(max_examples=30, deadline=None)
@given(forms(4, 2), forms(4, 2), st.lists(st.sampled_from([1, -1, 2]), min_size=4, max_size=4))
def test_hodge_inner_product_identity(a, b, diag):
    g = np.diag([Fraction(x) for x in diag]).astype(object)
    from hitchin_lab.exterior import inner
    lhs = wedge(a, hodge(b, g))
    vol = abs(det(g))
    rhs = top_form(4) * inner(a, b, g)
    # vol_g = sqrt|det g| e^{1234}; sqrt taken exactly when available
    r = S.exact_sqrt(vol)
    assert lhs == rhs * r


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.lists(st.sampled_from([1, -1]), min_size=4, max_size=4), st.data())
def test_double_hodge_sign(k, diag, data):
    a = data.draw(forms(4, k))
    g = np.diag([Fraction(x) for x in diag]).astype(object)
    sgn = (-1) ** (k * (4 - k)) * (1 if np.prod(diag) > 0 else -1)
    assert hodge(hodge(a, g), g) == a * sgn
