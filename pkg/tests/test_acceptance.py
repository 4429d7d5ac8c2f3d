"""Acceptance criteria 1-10, one test each, each printing a single PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or through pytest, where
the lines are repeated in the terminal summary.
"""
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from hitchin_lab import fixtures
from hitchin_lab import poly as P
from hitchin_lab import scalars as S
from hitchin_lab import special_kahler as SK
from hitchin_lab.curvature import certify, chart_from_h3h3, rigidity_component, sample_points
from hitchin_lab.exterior import KForm, parse_form, pullback
from hitchin_lab.flow import (FlowConfig, SixFlow, cone_family, cone_over_nearly_parallel, cosine_cone_family,
                              evolve_affine, kappa_solution, nk_fixture, recover_phi, star_phi)
from hitchin_lab.lie import TRICK17, hat_interior_check, h3h3, lambda_rho1_printed, rho1, trick17_check
from hitchin_lab.linalg import det, identity, matmul
from hitchin_lab.stable import (analyze3, b_matrix, g2_normal, g2_structure, hat2, lam, normal_rho,
                                normal_rho_hat, wedge_rank)

RESULTS = {}


def report(n: int, title: str, ok: bool, detail: str) -> bool:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def diff(a: KForm, b: KForm) -> float:
    return (a.to_float() - b.to_float()).norm_inf()


# ---------------------------------------------------------------------------

def test_criterion_01_lambda_polynomial():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(100):
        a = [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(9)]
        bad += lam(rho1(a)) != lambda_rho1_printed(a)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 5
    assert report(1, "lambda on rho1 equals the printed quartic", ok, f"100 tuples, {bad} mismatches, {dt:.2f}s")


def _unit(i, n=6):
    v = np.array([Fraction(0)] * n, dtype=object)
    v[i] = Fraction(1)
    return v


def test_criterion_02_normal_forms():
    checks = {}
    for eps in (1, -1):
        st = analyze3(normal_rho(eps))
        checks[f"lambda eps={eps}"] = st.lam == 4 * eps
        checks[f"J eps={eps}"] = all(list(st.J[:, i]) == list(_unit(i + 1) * eps) and list(st.J[:, i + 1]) == list(_unit(i))
                                     for i in (0, 2, 4))
        checks[f"hat eps={eps}"] = st.hat == normal_rho_hat(eps)
        checks[f"hat hat eps={eps}"] = analyze3(st.hat).hat == -normal_rho(eps)
    split = analyze3(parse_form("e123 + e456", 6))
    checks["split orbit"] = split.lam == 1 and all(split.J[i, i] == (1 if i < 3 else -1) for i in range(6))
    cpx = analyze3(parse_form("e135 - e146 - e236 - e245", 6))
    checks["complex orbit"] = cpx.lam == -4 and all(list(cpx.J[:, i]) == list(-_unit(i + 1)) for i in (0, 2, 4))
    for eps, tau in ((-1, 1), (-1, -1), (1, 1)):
        phi = g2_normal(eps, tau)
        G = g2_structure(phi)
        star = (parse_form("e3456 + e1256", 7) * (-eps * tau) + parse_form("e1234", 7) * (-eps)
                + parse_form("e2467", 7) * eps + parse_form("e2357 + e1457 + e1367", 7))
        checks[f"star phi ({eps},{tau})"] = G.star_phi() == star
        B = b_matrix(phi)
        diag = [-eps * tau, tau, -eps * tau, tau, -eps, 1, 1]
        checks[f"b_phi ({eps},{tau})"] = all(B[i, j] == (diag[i] if i == j else 0) for i in range(7) for j in range(7))
        checks[f"volume ({eps},{tau})"] = G.vol == -eps
    failed = [k for k, v in checks.items() if not v]
    assert report(2, "normal-form ledger", not failed, f"{len(checks)} exact identities, failed: {failed or 'none'}")


def test_criterion_03_kappa_families():
    r2 = S.sqrt2()
    expected = {"ex1": (P.from_roots([r2, r2, r2, -r2]), (-r2, r2)),
                "ex2": (P.from_roots([r2, -r2, -r2, -r2]), (-r2, r2)),
                "ex3": (P.mul([2, 0, 1], [2, 0, 1]), (None, None))}
    notes = []
    ok = True
    for ex in fixtures.kappa_examples():
        ks = kappa_solution(rho0=ex.rho)
        kp, iv = expected[ex.name]
        good = P.equal(ks.kappa, kp) and ks.interval == iv
        for x in (Fraction(0), Fraction(1, 2)):
            g, ref = ks.g(x), fixtures.printed_kappa_metric(ex.name, x)
            good &= all(a == b for a, b in zip(g.flat, ref.flat))
        ok &= good
        notes.append(f"{ex.name} {ks.kappa_string()} {'ok' if good else 'MISMATCH'}")
    assert report(3, "kappa polynomials, intervals and metrics", ok, "; ".join(notes))


def _compare_run(ks, ex, t_end, h):
    fl = SixFlow(h3h3(), ex.omega, ex.rho, FlowConfig(h=h))
    states = fl.run(t_end, h=h, record_every=max(1, int(round(0.01 / h))))
    err = drift = 0.0
    for s in states:
        x = ks.x_of_t(s.t)
        err = max(err, diff(s.rho, ks.rho(x)), diff(s.sigma, ks.sigma(x)))
        drift = max(drift, s.drift.worst())
    return err, drift


def test_criterion_04_flow_vs_closed_form():
    ex = fixtures.ex1()
    ks = kappa_solution(rho0=ex.rho)
    ends = [ks.t_of_x(-1.2), ks.t_of_x(1.2)]     # x = +-1.2 at opposite signs of t
    fine = [_compare_run(ks, ex, T, 5e-4) for T in ends]
    coarse = [_compare_run(ks, ex, T, 1e-3) for T in ends]
    err = max(e for e, _ in fine)
    drift = max(d for _, d in fine)
    ratios = [c[1] / f[1] for c, f in zip(coarse, fine)]
    ok = err < 1e-6 and drift < 1e-8 and all(8 <= r <= 32 for r in ratios)
    assert report(4, "RK4 parallel flow vs kappa closed form", ok,
                  f"h=5e-4, t in [{ends[1]:.3f}, {ends[0]:.3f}], error {err:.2e}, drift {drift:.2e}, "
                  f"drift ratio h=1e-3/5e-4 {', '.join(f'{r:.1f}' for r in ratios)} (h^4 gives 16)")


def test_criterion_05_holonomy_certification():
    t0 = time.perf_counter()
    notes = []
    ok = True
    for ex in fixtures.kappa_examples():
        ks = kappa_solution(rho0=ex.rho)
        lo, hi = ks.interval
        span = (-1.0 if lo is None else S.to_float(lo) * 0.5, 1.0 if hi is None else S.to_float(hi) * 0.5)
        cert = certify(chart_from_h3h3(ks), sample_points(7, 5, last=span))
        ranks = {r.operator_rank for r in cert.reports}
        gap = min(r.gap for r in cert.reports)
        ric = max(r.ricci_norm for r in cert.reports)
        good = ranks == {14} and gap >= 1e3 and ric < 1e-5
        ok &= good
        notes.append(f"{ex.name} rank {sorted(ranks)} gap {gap:.1e} Ric {ric:.1e}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    assert report(5, "curvature rank 14 on the three 7-metrics", ok, "; ".join(notes) + f"; {dt:.1f}s")


def test_criterion_06_rigidity():
    worst = {"others": 0.0, "nabla": 0.0, "ricci": 0.0, "affine": 0.0}
    L = h3h3()
    examples = fixtures.rigidity_examples()
    for ex in examples:
        cert = certify(chart_from_h3h3(ex.metric), sample_points(6))
        for r in cert.reports:
            rc = rigidity_component(r)
            worst["others"] = max(worst["others"], rc["others"])
            worst["nabla"] = max(worst["nabla"], r.parallel_residual)
            worst["ricci"] = max(worst["ricci"], r.ricci_norm)
        tr = evolve_affine(ex.omega, ex.rho, L)
        for s in SixFlow(L, ex.omega, ex.rho, FlowConfig(h=1e-2)).run(10.0, record_every=100):
            worst["affine"] = max(worst["affine"], diff(s.rho, tr.rho(s.t)), diff(s.sigma, tr.sigma(s.t)))
    ok = (len(examples) == 8 and worst["others"] < 1e-6 and worst["nabla"] < 1e-5 and worst["ricci"] < 1e-6
          and worst["affine"] < 1e-10)
    assert report(6, "rigidity of the eight omega-type 2..5 examples", ok,
                  ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_07_cone_suite():
    L, om, rho = nk_fixture()
    closed = cone_family(L, om, rho).closedness()
    cc = cosine_cone_family(L, om, rho)
    res = max(cc.residual(t) for t in (0.0, 0.3, 0.6))
    fl = SixFlow(L, cc.omega(0.0), cc.rho(0.0), FlowConfig(kind="nearly", lam=cc.lam, h=1e-3))
    err = max(max(diff(s.rho, cc.rho(s.t)), diff(s.sigma, hat2(cc.omega(s.t))))
              for s in fl.run(0.6, record_every=50))
    ok = closed["dphi_zero"] and closed["dstar_zero"] and res < 1e-10 and err < 1e-6
    assert report(7, "cone suite on su(2)+su(2)", ok,
                  f"cone exact closed {closed['dphi_zero'] and closed['dstar_zero']}, cosine residual {res:.1e}, "
                  f"nearly flow error {err:.1e}")


def test_criterion_08_cocalibrated_round_trip():
    rng = np.random.default_rng(8)
    worst = 0.0
    labels = set()
    for i in range(100):
        eps = 1 if i % 2 else -1
        # exp of a random gl(7) element: always invertible and orientation preserving
        phi = pullback(expm(0.3 * rng.standard_normal((7, 7))), g2_normal(eps, 1).to_float())
        labels.add(g2_structure(phi).label)
        seed = phi + KForm(7, 3, 1e-3 * rng.standard_normal(35))
        worst = max(worst, (recover_phi(star_phi(phi), seed) - phi).norm_inf() / phi.norm_inf())
    L, om, rho = nk_fixture()
    cc = cosine_cone_family(L, om, rho)
    cone = max(cone_over_nearly_parallel(L, lambda u: -cc.phi(u), lambda u: -cc.phi_dot(u), t, 1.3, mu=4)["dPhi"]
               for t in (0.0, 0.3))
    ok = worst < 1e-10 and cone < 1e-8 and len(labels) == 2
    assert report(8, "cocalibrated round trip and cone over nearly parallel", ok,
                  f"100 forms ({', '.join(sorted(labels))}), recovery error {worst:.1e}, d Phi {cone:.1e}")


def test_criterion_09_special_kahler_table():
    checks = {}
    for pq in ((3, 3), (5, 1)):
        checks[f"gamma {pq}"] = SK.gamma_signature(SK.unitary_space(*pq)) == (10, 10)
    cases = [(SK.sl6_case(), [4, 6]), (SK.su33_cases()[0], [1, 9]), (SK.su33_cases()[1], [5, 5]),
             (SK.su51_case(), [7, 3])]
    for case, sig in cases:
        checks[f"{case.group} {case.labels[0]}"] = SK.orbit_signature(case)["tangentSignature"] == sig
    for pq, t2 in (((3, 3), 1), ((5, 1), 1), ((4, 2), -1)):
        checks[f"tau^2 {pq}"] = SK.unitary_space(*pq).tau_square() == t2
    pt = SK.para_structure(parse_form("e123 + e456", 6), cross_check=True)
    checks["para J^2"] = (matmul(pt.J, pt.J) == identity(20)).all()
    pc = SK.para_case()
    p = pc.wedge3(*pc.u)
    checks["para gamma(u123,u123)"] = pc.gamma(p, p) == (1, 0)
    failed = [k for k, v in checks.items() if not v]
    assert report(9, "special Kaehler signature table", not failed, f"{len(checks)} exact checks, failed: {failed or 'none'}")


def test_criterion_10_property_suites():
    t17 = [trick17_check(k, 500) for k in sorted(TRICK17)]
    f1 = hat_interior_check(200)
    rng = random.Random(10)
    ranks = []
    for i in range(100):
        A = np.zeros((7, 7), dtype=object)
        while det(A) == 0:
            A = np.array([[Fraction(rng.randint(-2, 2)) for _ in range(7)] for _ in range(7)], dtype=object)
        ranks.append(wedge_rank(pullback(A, g2_normal(-1 if i % 2 else 1, 1)), 2))
    ok = (all(r["samples"] == r["passed"] == 500 for r in t17) and f1["passed"] == f1["samples"] == 200
          and ranks.count(21) == 100)
    detail = ", ".join(f"{r['algebra']} {r['passed']}/{r['samples']}" for r in t17)
    assert report(10, "property suites", ok,
                  f"trick17 {detail}; hat identity {f1['passed']}/{f1['samples']}; wedge rank 21 on {ranks.count(21)}/100")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
