from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hitchin_lab import fixtures
from hitchin_lab import scalars as S
from hitchin_lab.exterior import KForm, interior, parse_form, pullback, wedge
from hitchin_lab.lie import hat_interior_check
from hitchin_lab.linalg import det, inverse, matmul
from hitchin_lab.stable import (NotCompatible, NotStable, analyze3, cross_J, decompose, g2_normal, g2_structure,
                                hat2, lam, lift_metric, lift_to_7, lift_to_8, normal_pair, normal_rho,
                                normal_rho_hat, normal_signature, pair_analyze, recover_from_8, restrict_to_6,
                                sqrt_four_form, wedge_rank)

from strategies import matrices


def f(text, n=6):
    return parse_form(text, n)


def unit(i, n=6):
    v = np.array([Fraction(0)] * n, dtype=object)
    v[i] = Fraction(1)
    return v


OMEGA1 = f("e1f1 + e2f2 + e3f3")
# e1f1 + e2f2 + e3f3 cubes to a negative multiple of e^{123456}
O1 = -1


# ---------------------------------------------------------------------------
# three-forms in six dimensions

def test_lambda_of_split_form():
    assert lam(f("e123 + e456")) == 1


def test_lambda_of_complex_normal_form():
    assert lam(f("e135 - e146 - e236 - e245")) == -4


def test_non_stable_rejected():
    assert lam(f("e123")) == 0
    with pytest.raises(NotStable):
        analyze3(f("e123"))


@pytest.mark.parametrize("eps", [1, -1])
def test_normal_form_J_and_hat(eps):
    st_ = analyze3(normal_rho(eps))
    assert st_.lam == 4 * eps
    for i in (0, 2, 4):
        assert list(st_.J[:, i]) == list(unit(i + 1) * eps)
    assert st_.hat == normal_rho_hat(eps)
    J2 = matmul(st_.J, st_.J)
    assert all(x == (eps if i == j else 0) for (i, j), x in np.ndenumerate(J2))


@pytest.mark.parametrize("eps", [1, -1])
@pytest.mark.parametrize("t", [0, 1, 2])
def test_lambda_along_hat_direction(eps, t):
    rho = normal_rho(eps)
    assert lam(rho + analyze3(rho).hat * t) == 4 * eps * (-eps + t * t) ** 2


def test_decompose_split_form():
    eps, a, b = decompose(f("e123 + e456"))
    assert (eps, a, b) == (1, f("e123"), f("e456"))


def test_decompose_complex_form():
    rho = normal_rho(-1)
    eps, re, im = decompose(rho)
    assert eps == -1 and re == rho and im == normal_rho_hat(-1)


def _decomposable(a: KForm) -> bool:
    return all(wedge(a, interior(unit(i), a)).is_zero() for i in range(6))


@settings(max_examples=25, deadline=None)
@given(matrices(6))
def test_decompose_returns_decomposables(A):
    assume(det(A) != 0)
    rho = pullback(A, f("e123 + e456"))
    _, a, b = decompose(rho)
    assert a + b == rho
    assert _decomposable(a) and _decomposable(b)


@settings(max_examples=40, deadline=None)
@given(matrices(6), st.sampled_from([1, -1]))
def test_hat_hat_is_minus_identity(A, eps):
    assume(det(A) != 0)
    rho = pullback(A, normal_rho(eps))
    st_ = analyze3(rho)
    assume(st_.exact)
    assert analyze3(st_.hat).hat == -rho


@settings(max_examples=40, deadline=None)
@given(matrices(6), st.sampled_from([1, -1]), st.fractions(-3, 3, max_denominator=3))
def test_homogeneity_and_euler(A, eps, t):
    assume(det(A) != 0 and t != 0)
    rho = pullback(A, normal_rho(eps))
    assert lam(rho * t) == t ** 4 * lam(rho)
    st_ = analyze3(rho)
    assume(st_.exact)
    assert analyze3(rho * t).phi == t * t * st_.phi
    assert wedge(st_.hat, rho).top_coeff() == 2 * st_.phi


@settings(max_examples=30, deadline=None)
@given(matrices(6), st.sampled_from([1, -1]))
def test_equivariance(A, eps):
    d = det(A)
    assume(d > 0)
    rho = normal_rho(eps)
    rA = pullback(A, rho)
    assert lam(rA) == d * d * lam(rho)
    assert all(x == y for x, y in zip(analyze3(rA).J.flat, matmul(matmul(inverse(A), analyze3(rho).J), A).flat))


def test_hat_interior_identity():
    res = hat_interior_check(samples=40)
    assert res["passed"] == res["samples"]


# ---------------------------------------------------------------------------
# four-forms and pairs

def test_sqrt_of_omega_squared():
    assert sqrt_four_form(hat2(OMEGA1), O1) == OMEGA1
    assert sqrt_four_form(hat2(OMEGA1), 1) == -OMEGA1


def test_sqrt_along_the_kappa_direction():
    y = Fraction(3, 4)
    sigma = hat2(OMEGA1) + f("e12f12") * y
    expected = f("e1f1 + e2f2") * Fraction(1, 2) + f("e3f3") * 2
    assert sqrt_four_form(sigma, O1) == expected


@settings(max_examples=25, deadline=None)
@given(matrices(6))
def test_sqrt_is_equivariant(A):
    d = det(A)
    assume(d != 0)
    sigma = pullback(A, hat2(OMEGA1))
    om = sqrt_four_form(sigma, orientation=O1 * S.sign(d))
    ref = pullback(A, OMEGA1)
    assert (om.to_float() - ref.to_float()).norm_inf() < 1e-9 * max(1.0, ref.to_float().norm_inf())


def test_normal_pair_is_su3():
    p = pair_analyze(*normal_pair(-1, 1))
    assert p.signature == (6, 0) and p.label == "SU(3)" and p.normalized


@pytest.mark.parametrize("eps,tau", [(-1, 1), (-1, -1), (1, 1)])
def test_signature_table(eps, tau):
    assert pair_analyze(*normal_pair(eps, tau)).signature == normal_signature(eps, tau)


def test_ex3_metric_and_label():
    ex = fixtures.ex3()
    p = pair_analyze(ex.omega, ex.rho)
    assert p.label == "SL(3,R)"
    assert all(x == y for x, y in zip(p.g.flat, ex.metric.flat))


def test_ex2_signature():
    ex = fixtures.ex2()
    p = pair_analyze(ex.omega, ex.rho)
    assert p.signature == (2, 4) and p.label == "SU(1,2)"


def test_incompatible_pair():
    with pytest.raises(NotCompatible):
        pair_analyze(OMEGA1, f("e124 + e356"))


@pytest.mark.parametrize("ex", fixtures.kappa_examples(), ids=lambda e: e.name)
def test_metric_is_compatible_with_J(ex):
    p = pair_analyze(ex.omega, ex.rho)
    lhs = matmul(matmul(p.J.T, p.g), p.J)
    assert all(x == -p.epsilon * y for x, y in zip(lhs.flat, p.g.flat))
    assert wedge(p.hat, ex.rho) == wedge(wedge(ex.omega, ex.omega), ex.omega) * Fraction(2, 3)


# ---------------------------------------------------------------------------
# seven and eight dimensions

@pytest.mark.parametrize("eps,tau,sig,label", [(-1, 1, (7, 0), "G2"), (1, 1, (3, 4), "G2*")])
def test_g2_lift(eps, tau, sig, label):
    om, rho = normal_pair(eps, tau)
    G = g2_structure(lift_to_7(om, rho).phi)
    assert G.signature == sig and G.label == label and G.vol == -eps
    pattern = [tau, -eps * tau, tau, -eps * tau, 1, -eps, -eps]
    assert [G.g[i, i] for i in range(7)] == pattern
    assert all(x == y for x, y in zip(G.g.flat, lift_metric(pair_analyze(om, rho)).flat))


def test_restriction_gives_the_pair_back():
    om, rho = normal_pair(-1, 1)
    G = g2_structure(lift_to_7(om, rho).phi)
    R = restrict_to_6(G, unit(6, 7))
    assert R.omega == om and R.rho == rho


def test_cross_product_J_matches_pair_J():
    G = g2_structure(g2_normal(-1, 1).to_float())
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = rng.normal(size=7)
        n /= np.sqrt(n @ G.g @ n)
        R = restrict_to_6(G, n)
        p = pair_analyze(R.omega, R.rho, tol=1e-9)
        assert p.normalized
        assert np.max(np.abs(cross_J(G, R) - p.J)) < 1e-10


@pytest.mark.parametrize("tau,label,sig", [(1, "Spin(7)", (8, 0)), (-1, "Spin0(3,4)", (4, 4))])
def test_spin7_lift(tau, label, sig):
    from hitchin_lab.stable import signature_of
    G = g2_structure(g2_normal(-1, tau))
    S8 = lift_to_8(G)
    assert S8.label == label and signature_of(S8.g) == sig
    assert recover_from_8(S8) == G.phi


def test_wedge_with_phi():
    phi = g2_normal(-1, 1)
    assert not wedge(f("e12", 7), phi).is_zero()
    assert wedge(KForm.zero(7, 2), phi).is_zero()
    assert wedge_rank(phi, 2) == 21
    assert wedge_rank(phi, 1) == 7
