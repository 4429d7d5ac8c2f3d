import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hitchin_lab import fixtures
from hitchin_lab.exterior import KForm, parse_form, pullback, wedge
from hitchin_lab.lie import (TRICK17, LieAlgebra, NotALieAlgebra, NotInDomain, aut0, classify_two_form,
                             closed_three_forms, d_hat_interior_check, h3h3, halfflat_family, is_automorphism,
                             lambda_rho1_printed, lie_lemma_check, omega_normal, projections, rho1, rho1_basis, su2su2,
                             swap_summands, trick17_algebra, trick17_check)
from hitchin_lab.linalg import det, rank
from hitchin_lab.stable import NotStable, lam

from strategies import forms


def f(text, n=6):
    return parse_form(text, n)


ALGEBRAS = [h3h3(), su2su2()] + [trick17_algebra(k) for k in TRICK17]


@pytest.mark.parametrize("L", ALGEBRAS, ids=lambda L: L.name)
@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_d_squared_vanishes(L, data):
    k = data.draw(st.integers(1, 4))
    a = data.draw(forms(6, k))
    assert L.d(L.d(a)).is_zero()


def test_non_jacobi_rejected():
    with pytest.raises(NotALieAlgebra):
        LieAlgebra.from_salamon("0,0,e12,e13+e24")


def test_standard_differentials():
    L = h3h3()
    assert L.d(f("e3f3")) == f("e12f3 - e3f12")
    assert L.d(fixtures.ex1().rho).is_zero()
    assert trick17_algebra("n1").d(f("e5")) == f("e12")


def test_rho1_family_is_compatible_and_closed():
    L = h3h3()
    for b in rho1_basis():
        assert wedge(b, omega_normal(1)).is_zero()
        assert L.d(b).is_zero()


@pytest.mark.parametrize("kind", [1, 2, 3, 4, 5])
def test_halfflat_family_has_nine_parameters(kind):
    om = omega_normal(kind, Fraction(2)) if kind == 4 else omega_normal(kind)
    fam = halfflat_family(om)
    assert len(fam) == 9
    L = h3h3()
    assert all(L.d(r).is_zero() and wedge(om, r).is_zero() for r in fam)
    assert L.d(wedge(om, om)).is_zero()


def test_type1_family_spans_rho1():
    fam = halfflat_family(omega_normal(1))
    M = np.array([b.c for b in fam + rho1_basis()], dtype=object)
    assert rank(M) == 9


def test_lambda_on_rho1_matches_printed_quartic():
    rng = random.Random(7)
    for _ in range(10):
        a = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(9)]
        assert lam(rho1(a)) == lambda_rho1_printed(a)


def test_classify_type_one_is_identity():
    c = classify_two_form(omega_normal(1))
    assert c.kind == 1 and c.scale == 1
    assert pullback(c.T, omega_normal(1)) == omega_normal(1)


def test_classify_type_two():
    assert classify_two_form(f("e2f2 + e13 + f13")).kind == 2


@pytest.mark.parametrize("beta", [Fraction(2), Fraction(-1, 3), Fraction(5, 2)])
def test_classify_type_four_recovers_beta(beta):
    c = classify_two_form(f("e1f3 + e2f2 + e3f1 + e13") + f("f13") * beta)
    assert c.kind == 4 and c.beta == beta


def test_classify_rejects_degenerate_and_non_coclosed():
    with pytest.raises(NotStable):
        classify_two_form(f("e12"))
    with pytest.raises(NotInDomain):
        classify_two_form(f("e1f1 + e2f2 + e3f3 + e12"))


@st.composite
def positive_gl2(draw):
    # lower unitriangular times upper triangular with positive diagonal
    l, u = draw(st.integers(-2, 2)), draw(st.integers(-2, 2))
    p, q = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    return [[p, u], [l * p, l * u + q]]


@st.composite
def automorphisms(draw):
    ints = st.integers(-3, 3)
    vec = lambda: [draw(ints), draw(ints)]
    return aut0(draw(positive_gl2()), vec(), draw(positive_gl2()), vec(), vec(), vec())


@pytest.mark.parametrize("kind", [1, 2, 3, 4, 5])
@settings(max_examples=12, deadline=None)
@given(M=automorphisms())
def test_type_is_an_automorphism_invariant(kind, M):
    om = omega_normal(kind, Fraction(3)) if kind == 4 else omega_normal(kind)
    assert is_automorphism(h3h3(), M)
    image = pullback(M, om)
    c = classify_two_form(image)
    assert c.kind == kind
    assert pullback(c.T, image) == c.normal * c.scale
    assert is_automorphism(h3h3(), c.T)


def test_swap_is_an_automorphism():
    assert is_automorphism(h3h3(), swap_summands())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=9, max_size=9))
def test_kappa_one_forms_classify_as_type_one(a):
    om = omega_normal(1)
    for i, x in enumerate(a[:3]):
        om = om + f(["e1f2", "e2f1", "e13"][i]) * x
    assume(det(om.as_matrix()) != 0)
    L = h3h3()
    assume(L.d(wedge(om, om)).is_zero())
    assume(any(projections(om)["k1"]))
    assert classify_two_form(om).kind == 1


@pytest.mark.parametrize("key", sorted(TRICK17))
def test_trick17_on_samples(key):
    res = trick17_check(key, samples=25)
    assert res["samples"] == 25 and res["passed"] == 25


def test_closed_forms_nonempty():
    assert len(closed_three_forms(h3h3())) > 9


def test_lie_derivative_lemma():
    for L in (h3h3(), su2su2()):
        res = lie_lemma_check(L, samples=15)
        assert res["passed"] == res["samples"]


def test_differentiated_hat_identity():
    res = d_hat_interior_check(samples=20)
    assert res["passed"] == res["samples"]
