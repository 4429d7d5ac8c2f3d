from fractions import Fraction

import numpy as np
import pytest

from hitchin_lab import fixtures
from hitchin_lab import poly as P
from hitchin_lab import scalars as S
from hitchin_lab.exterior import KForm, parse_form, pullback
from hitchin_lab.flow import (DIRECTION, CocalibratedFlow, FlowConfig, NotNearlyKaehler, NotNormalized,
                              OutsideInterval, SixFlow, WrongNormalForm, WrongOrbit, _lift, cone_family,
                              cosine_cone_family, evolve_affine, kappa_solution, nk_fixture, nk_residuals,
                              recover_phi, spin_form_residual, star_phi, trajectory_records)
from hitchin_lab.lie import h3h3, omega_normal, product_with_line
from hitchin_lab.stable import g2_normal, hat2, pair_analyze

R2 = S.sqrt2()


def close(a, b):
    return (a.to_float() - b.to_float()).norm_inf()


@pytest.fixture(scope="module")
def kappas():
    return {ex.name: kappa_solution(rho0=ex.rho) for ex in fixtures.kappa_examples()}


@pytest.mark.parametrize("name, roots, interval", [
    ("ex1", [R2, R2, R2, -R2], (-R2, R2)),
    ("ex2", [R2, -R2, -R2, -R2], (-R2, R2)),
    ("ex3", None, (None, None)),
])
def test_kappa_polynomials(kappas, name, roots, interval):
    ks = kappas[name]
    expected = P.mul([2, 0, 1], [2, 0, 1]) if roots is None else P.from_roots(roots)
    assert P.equal(ks.kappa, expected)
    assert ks.interval == interval


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3"])
@pytest.mark.parametrize("x", [Fraction(0), Fraction(1, 2), Fraction(-1, 3)])
def test_metric_matches_printed_table(kappas, name, x):
    g = kappas[name].g(x)
    ref = fixtures.printed_kappa_metric(name, x)
    assert all(a == b for a, b in zip(g.flat, ref.flat))


def test_kappa_at_zero_is_normalized(kappas):
    for ks in kappas.values():
        assert ks.kappa_at(0) == 4 * ks.epsilon


def test_closed_form_solves_the_flow(kappas):
    # d rho/dt = (d rho/dx) / (dt/dx) must equal d omega
    L = h3h3()
    for ks in kappas.values():
        for x in (-0.7, 0.1, 0.9):
            drho_dx = parse_form(DIRECTION, 6).to_float() * ks.sign
            assert close(drho_dx * (1 / ks.speed(x)), L.d(ks.omega(x))) < 1e-12


def test_time_parametrization_round_trip(kappas):
    ks = kappas["ex1"]
    assert ks.x_of_t(0) == 0.0
    for t in (-0.4, 0.2, 1.1):
        assert abs(ks.t_of_x(ks.x_of_t(t)) - t) < 1e-12


def test_outside_interval(kappas):
    with pytest.raises(OutsideInterval):
        kappas["ex1"].omega(Fraction(2))


def test_kappa_needs_standard_omega():
    ex = fixtures.ex1()
    with pytest.raises(WrongNormalForm):
        kappa_solution(rho0=ex.rho, omega0=omega_normal(2))


def test_rk4_follows_closed_form(kappas):
    ex = fixtures.ex1()
    ks = kappas["ex1"]
    states = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(h=1e-3)).run(0.2, record_every=50)
    for s in states:
        x = ks.x_of_t(s.t)
        assert close(s.rho, ks.rho(x)) < 1e-9
        assert close(s.sigma, ks.sigma(x)) < 1e-9
        assert s.drift.worst() < 1e-9


def test_flow_is_reversible():
    ex = fixtures.ex3()
    fl = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(h=1e-2))
    end = fl.run(0.5)[-1]
    back = fl.run(0.0, t0=0.5, y0=np.concatenate([end.rho.c, end.sigma.c]))[-1]
    assert close(back.rho, ex.rho) < 1e-10
    assert close(back.sigma, hat2(ex.omega)) < 1e-10


def test_rk45_agrees_with_rk4():
    ex = fixtures.ex2()
    a = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(h=1e-3)).final(0.3)
    b = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(stepper="rk45")).final(0.3)
    assert close(a.rho, b.rho) < 1e-8


def test_flow_rejects_unnormalized_pairs():
    ex = fixtures.ex1()
    with pytest.raises(NotNormalized):
        SixFlow(h3h3(), ex.omega, ex.rho * 2)
    with pytest.raises(ValueError):
        FlowConfig(kind="nearly")


def test_trajectory_records():
    ex = fixtures.ex1()
    states = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(h=1e-2)).run(0.05)
    recs = trajectory_records(states)
    assert len(recs) == 6 and recs[0]["t"] == "0"
    assert set(recs[0]["drift"]) == {"dRho", "dSigma", "compat", "normalization"}


# affine solutions --------------------------------------------------------

@pytest.fixture(scope="module")
def rigid():
    return fixtures.rigidity_examples(Fraction(2))


def test_affine_solutions_are_exact(rigid):
    for ex in rigid:
        tr = evolve_affine(ex.omega, ex.rho)
        assert tr.orbit in (2, 3, 4, 5)
        res = tr.check(Fraction(7, 3))
        assert all(v == 0 for v in res.values()), (ex.name, res)


def test_affine_solutions_match_rk4(rigid):
    for ex in rigid[:3]:
        tr = evolve_affine(ex.omega, ex.rho)
        s = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(h=1e-2)).final(1.0)
        assert close(s.rho, tr.rho(Fraction(1))) < 1e-10
        assert close(s.sigma, tr.sigma(Fraction(1))) < 1e-10


def test_affine_rejects_type_one():
    ex = fixtures.ex1()
    with pytest.raises(WrongOrbit):
        evolve_affine(ex.omega, ex.rho)


# nearly Kaehler and cones --------------------------------------------------

@pytest.fixture(scope="module")
def nk():
    return nk_fixture()


def test_nearly_kaehler_fixture(nk):
    res = nk_residuals(*nk)
    assert res["nk1"] == 0 and res["nk2"] < 1e-12 and res["normalized"]


def test_cone_family_closed(nk):
    assert cone_family(*nk).closedness() == {"dphi_zero": True, "dstar_zero": True}


def test_cone_family_requires_nearly_kaehler():
    ex = fixtures.ex1()
    with pytest.raises(NotNearlyKaehler):
        cone_family(h3h3(), ex.omega, ex.rho)


def test_cosine_family_is_nearly_parallel(nk):
    cc = cosine_cone_family(*nk)
    for t in (0.0, 0.4):
        assert cc.residual(t) < 1e-10


def test_nearly_flow_reproduces_cosine_family(nk):
    L = nk[0]
    cc = cosine_cone_family(*nk)
    fl = SixFlow(L, cc.omega(0.0), cc.rho(0.0), FlowConfig(kind="nearly", lam=cc.lam, h=1e-3))
    for s in fl.run(0.2, record_every=50):
        assert close(s.rho, cc.rho(s.t)) < 1e-8
        assert close(s.sigma, hat2(cc.omega(s.t))) < 1e-8
        assert s.drift.nearly < 1e-8


# seven dimensions ----------------------------------------------------------

@pytest.mark.parametrize("eps", [1, -1])
def test_recover_phi(eps):
    rng = np.random.default_rng(3 + eps)
    phi = pullback(np.eye(7) + 0.3 * rng.standard_normal((7, 7)), g2_normal(eps, 1).to_float())
    seed = phi + KForm(7, 3, 1e-3 * rng.standard_normal(35))
    assert (recover_phi(star_phi(phi), seed) - phi).norm_inf() < 1e-10


def test_cocalibrated_flow_builds_closed_four_form():
    ex = fixtures.ex3()
    L7 = product_with_line(h3h3())
    phi = _lift(ex.omega, pair_analyze(ex.omega, ex.rho).hat, True)
    fl = CocalibratedFlow(L7, phi, h=1e-2)
    traj = fl.run(0.05)
    assert max(fl.cocalibration(psi) for _, _, psi in traj) < 1e-12
    assert spin_form_residual(L7, traj) < 1e-4
