"""Stable forms: 3-forms in dimension 6, compatible pairs, and 3-forms in 7 and 8."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import scalars as S
from .exterior import (DegreeError, DimensionMismatch, FormError, KForm, basis, hodge,
                       interior, kappa_dual, parse_form, pullback, wedge, embed, wedge_all)
from .linalg import det, float_signature, inertia, inverse, rank, identity


class NotStable(FormError):
    pass


class NotCompatible(FormError):
    pass


class NotNormalized(FormError):
    pass


class NoRealRoot(FormError):
    pass


GROUP_LABELS = {
    (-1, (6, 0)): "SU(3)", (-1, (0, 6)): "SU(3)",
    (-1, (2, 4)): "SU(1,2)", (-1, (4, 2)): "SU(1,2)",
    (1, (3, 3)): "SL(3,R)",
}


def _unit_vec(n, i, exact):
    v = [Fraction(0) if exact else 0.0] * n
    v[i] = Fraction(1) if exact else 1.0
    return np.array(v, dtype=object if exact else float)


def K_matrix(rho: KForm, orientation=1) -> np.ndarray:
    """K_rho(v) = kappa((v -| rho) ^ rho); column j is K(e_j)."""
    if rho.n != 6:
        raise DimensionMismatch("stable 3-forms are handled in dimension 6")
    if rho.k != 3:
        raise DegreeError("K_rho needs a 3-form")
    exact = rho.exact
    cols = []
    for j in range(6):
        a = wedge(interior(_unit_vec(6, j, exact), rho), rho)
        cols.append(kappa_dual(a, orientation).c)
    K = np.array(cols, dtype=object if exact else rho.c.dtype).T
    return K


def lam(rho: KForm):
    """Hitchin's quartic invariant in units of (e^{1..6})^2."""
    K = K_matrix(rho)
    return np.trace(K.dot(K)) / 6 if not rho.exact else sum(K.dot(K)[i, i] for i in range(6)) / 6


def _sqrt_or_float(x):
    r = S.exact_sqrt(x) if S.is_exact(x) else None
    if r is None:
        return S.sqrt_any(x), False
    return r, True


@dataclass
class StableForm3:
    rho: KForm
    lam: object
    epsilon: int
    orientation: int
    K: np.ndarray
    phi: object            # sqrt|lambda| relative to the orientation
    J: np.ndarray
    hat: KForm
    exact: bool

    def volume(self):
        return self.phi * self.orientation


def analyze3(rho: KForm, orientation: int = 1, tol: float = S.FLOAT_TOL) -> StableForm3:
    """lambda, epsilon, J and the dual 3-form hat(rho) = J^* rho."""
    K = K_matrix(rho, orientation)
    if rho.exact:
        l = sum(K.dot(K)[i, i] for i in range(6)) / 6
    else:
        l = float(np.trace(K @ K).real) / 6
    # lambda is quartic in rho; compare against the matching power of its size
    if S.is_zero(l, 0.0 if rho.exact else tol * max(rho.norm_inf(), 1e-300) ** 4):
        raise NotStable("lambda(rho) = 0")
    eps = S.sign(l)
    phi, ok = _sqrt_or_float(abs(l))
    exact = rho.exact and ok
    if rho.exact and not ok:
        K = np.array([[S.to_float(x) for x in r] for r in K])
        rho_use = rho.to_float()
    else:
        rho_use = rho
    J = K * (1 / phi) if exact else K / phi
    hat = pullback(J, rho_use)
    return StableForm3(rho, l, eps, orientation, K, phi, J, hat, exact)


def hat3(rho: KForm, orientation: int = 1) -> KForm:
    return analyze3(rho, orientation).hat


def decompose(rho: KForm, orientation: int = 1):
    """lambda > 0: (alpha, beta) with rho = alpha + beta, hat = alpha - beta.
    lambda < 0: (re, im) = (rho, hat)."""
    st = analyze3(rho, orientation)
    if st.epsilon > 0:
        return st.epsilon, ((st.rho.to_float() if not st.exact and rho.exact else rho) + st.hat) * Fraction(1, 2) \
            if st.exact else (rho.to_float() + st.hat) * 0.5, \
            ((rho + st.hat * -1) * Fraction(1, 2)) if st.exact else (rho.to_float() - st.hat) * 0.5
    return st.epsilon, rho, st.hat


# ---------------------------------------------------------------------------
# compatible pairs

def omega_volume(omega: KForm):
    """phi(omega) = omega^3 / 6 as a coefficient of e^{1..6}."""
    return wedge_all(omega, omega, omega).top_coeff() / 6


def hat2(omega: KForm) -> KForm:
    """hat(omega) = omega^2 / 2."""
    w = wedge(omega, omega)
    return w * Fraction(1, 2) if w.exact else w * 0.5


def signature_of(g, exact: bool | None = None):
    g = np.asarray(g)
    if g.dtype == object:
        p, q, z = inertia(g)
        if z:
            raise FormError("degenerate metric")
        return p, q
    return float_signature(g)


@dataclass
class StablePair:
    omega: KForm
    rho: KForm
    epsilon: int
    orientation: int
    J: np.ndarray
    g: np.ndarray
    signature: tuple
    label: str
    normalized: bool
    phi_rho: object
    phi_omega: object
    hat: KForm
    exact: bool

    @property
    def sigma(self) -> KForm:
        return hat2(self.omega)

    def volumes(self):
        return {"phi_rho": self.phi_rho, "phi_omega": self.phi_omega}


def pair_analyze(omega: KForm, rho: KForm, tol: float = S.FLOAT_TOL,
                 require_normalized: bool = False, orientation: int | None = None) -> StablePair:
    if omega.n != 6 or rho.n != 6:
        raise DimensionMismatch("pairs live in dimension 6")
    if omega.k != 2 or rho.k != 3:
        raise DegreeError("pair needs a 2-form and a 3-form")
    vo = omega_volume(omega)
    if S.is_zero(vo, tol):
        raise NotStable("omega is degenerate")
    if orientation is None:
        orientation = S.sign(vo)
    comp = wedge(omega, rho)
    if not comp.is_zero(tol):
        raise NotCompatible("omega ^ rho != 0")
    st = analyze3(rho, orientation, tol)
    exact = st.exact and omega.exact
    W = omega.as_matrix() if exact else omega.to_float().as_matrix()
    J = st.J
    g = st.epsilon * W.dot(J)
    if not exact:
        g = np.asarray(g, dtype=float)
        g = (g + g.T) / 2
    sig = signature_of(g)
    phi_rho = st.phi
    phi_om = vo * orientation
    if exact:
        normalized = phi_rho == 2 * phi_om
    else:
        normalized = abs(float(phi_rho) - 2 * float(phi_om)) <= tol * max(1.0, abs(float(phi_rho)))
    if require_normalized and not normalized:
        raise NotNormalized("phi(rho) != 2 phi(omega)")
    label = GROUP_LABELS.get((st.epsilon, sig), "unknown")
    return StablePair(omega, rho, st.epsilon, orientation, J, g, sig, label, normalized,
                      phi_rho, phi_om, st.hat, exact)


def normalize_pair(omega: KForm, rho: KForm) -> tuple:
    """Rescale rho by a positive constant so that phi(rho) = 2 phi(omega)."""
    p = pair_analyze(omega, rho)
    ratio = 2 * p.phi_omega / p.phi_rho
    if S.sign(ratio) <= 0:
        raise NotNormalized("orientation of rho and omega disagree")
    c, ok = _sqrt_or_float(ratio)
    if p.exact and ok:
        return omega, rho * c
    return omega.to_float(), rho.to_float() * float(c)


def normal_rho(eps: int, exact: bool = True) -> KForm:
    r = parse_form("e135", 6) + parse_form("e146 + e236 + e245", 6) * eps
    return r if exact else r.to_float()


def normal_rho_hat(eps: int) -> KForm:
    return parse_form("e246", 6) + parse_form("e235 + e145 + e136", 6) * eps


def normal_pair(eps: int, tau: int, exact: bool = True):
    if (eps, tau) not in ((-1, 1), (-1, -1), (1, 1)):
        raise ValueError("normal forms exist for (eps, tau) in {(-1,1), (-1,-1), (1,1)}")
    om = parse_form("e12 + e34", 6) * tau + parse_form("e56", 6)
    rho = normal_rho(eps)
    return (om, rho) if exact else (om.to_float(), rho.to_float())


def normal_signature(eps: int, tau: int):
    pattern = [tau, -eps * tau, tau, -eps * tau, 1, -eps]
    return sum(1 for x in pattern if x > 0), sum(1 for x in pattern if x < 0)


def sqrt_four_form(sigma: KForm, orientation: int = 1, tol: float = S.FLOAT_TOL) -> KForm:
    """The unique omega with omega^2/2 = sigma and omega^3 positive w.r.t. orientation."""
    if sigma.n != 6 or sigma.k != 4:
        raise DegreeError("sqrt_four_form needs a 4-form in dimension 6")
    P = kappa_dual(sigma).as_matrix()
    exact = sigma.exact
    if exact:
        try:
            W0 = inverse(P)
        except ZeroDivisionError:
            raise NotStable("sigma is degenerate")
    else:
        if abs(np.linalg.det(P)) <= tol * float(np.max(np.abs(P))) ** 6:
            raise NotStable("sigma is degenerate")
        W0 = np.linalg.inv(P)
    from .exterior import two_form_from_matrix
    om0 = two_form_from_matrix(W0)
    s0 = hat2(om0)
    # sigma = mu * s0 for the scale mu
    i = max(range(len(sigma.c)), key=lambda j: abs(S.to_float(sigma.c[j])))
    mu = sigma.c[i] / s0.c[i] if exact else float(sigma.c[i]) / float(s0.c[i])
    if S.sign(mu) <= 0:
        raise NoRealRoot("sigma is not the square of a real 2-form")
    r, ok = _sqrt_or_float(mu)
    if exact and ok:
        om = om0 * r
    else:
        om = om0.to_float() * float(r)
    if S.sign(omega_volume(om)) * orientation < 0:
        om = -om
    chk = hat2(om) - (sigma if om.exact else sigma.to_float())
    if not chk.is_zero(max(tol, 1e-9 * sigma.norm_inf())):
        raise NoRealRoot("sigma is not of the form omega^2/2")
    return om


# ---------------------------------------------------------------------------
# dimension 7

def b_matrix(phi: KForm) -> np.ndarray:
    """b(v, w) = (1/6) (v -| phi) ^ (w -| phi) ^ phi as a coefficient of e^{1..7}."""
    if phi.n != 7 or phi.k != 3:
        raise DegreeError("b_phi needs a 3-form in dimension 7")
    exact = phi.exact
    ints = [interior(_unit_vec(7, j, exact), phi) for j in range(7)]
    B = np.empty((7, 7), dtype=object if exact else float)
    for i in range(7):
        for j in range(i, 7):
            v = wedge_all(ints[i], ints[j], phi).top_coeff()
            B[i, j] = B[j, i] = v * Fraction(1, 6) if exact else v / 6.0
    return B


@dataclass
class G2Structure:
    phi: KForm
    g: np.ndarray
    vol: object            # phi(phi) as a coefficient of e^{1..7}
    orientation: int
    signature: tuple
    label: str
    exact: bool

    def star_phi(self) -> KForm:
        return hodge(self.phi, self.g, self.orientation)

    def hat(self) -> KForm:
        psi = self.star_phi()
        return psi * Fraction(1, 3) if psi.exact else psi / 3.0

    def star(self, a: KForm) -> KForm:
        return hodge(a, self.g, self.orientation)


def g2_structure(phi: KForm, tol: float = S.FLOAT_TOL) -> G2Structure:
    B = b_matrix(phi)
    dB = det(B)
    # relative test: b_phi scales cubically with phi, so det b_phi spans many decades
    scale = max(abs(S.to_float(x)) for x in B.flat) ** 7
    if S.is_zero(dB, 0.0) if S.is_exact(dB) else abs(float(dB)) <= tol * scale:
        raise NotStable("b_phi is degenerate")
    exact = phi.exact
    c = S.frac_root(dB, 9) if exact and isinstance(dB, (int, Fraction)) else None
    if c is None:
        exact = False
        fb = float(dB)
        c = float(np.sign(fb) * abs(fb) ** (1.0 / 9))
        B = np.array([[S.to_float(x) for x in r] for r in B])
        phi = phi.to_float()
    g = B * (1 / c) if exact else B / c
    sig = signature_of(g)
    label = "G2" if 0 in sig else ("G2*" if sorted(sig) == [3, 4] else "unknown")
    return G2Structure(phi, g, c, S.sign(c), sig, label, exact)


def g2_normal(eps: int, tau: int) -> KForm:
    om, rho = normal_pair(eps, tau)
    return lift_to_7(om, rho).phi


@dataclass
class Lift7:
    phi: KForm
    g: np.ndarray


def lift_to_7(omega: KForm, rho: KForm, alpha_scale=1) -> Lift7:
    """phi = omega ^ alpha + rho with alpha = alpha_scale * e^7."""
    om7 = embed(omega, 7)
    rho7 = embed(rho, 7)
    one = Fraction(1) if omega.exact else 1.0
    e7 = KForm.from_terms(7, [((6,), one * alpha_scale)], exact=omega.exact)
    phi = wedge(om7, e7) + rho7
    return Lift7(phi, None)


def lift_metric(pair: StablePair, alpha_scale=1) -> np.ndarray:
    """g_phi = g - eps alpha^2."""
    exact = pair.g.dtype == object
    g = np.empty((7, 7), dtype=object if exact else float)
    g[:, :] = Fraction(0) if exact else 0.0
    g[:6, :6] = pair.g
    g[6, 6] = -pair.epsilon * alpha_scale * alpha_scale
    return g


def cross_product(G: G2Structure, y, z) -> np.ndarray:
    """y x z defined by phi(x, y, z) = g(x, y x z)."""
    form = interior(np.asarray(z), interior(np.asarray(y), G.phi))
    ginv = inverse(G.g)
    return ginv.dot(form.c)


@dataclass
class Restriction6:
    omega: KForm
    rho: KForm
    frame: np.ndarray      # 7x6, columns span the orthogonal complement of n
    normal: np.ndarray


def restrict_to_6(G: G2Structure, n) -> Restriction6:
    n = np.asarray(n, dtype=object if G.exact else float)
    gnn = n.dot(G.g.dot(n))
    if S.is_zero(gnn):
        raise FormError("normal vector is null")
    piv = max(range(7), key=lambda i: abs(S.to_float(n[i])))
    cols = []
    for i in range(7):
        if i == piv:
            continue
        e = _unit_vec(7, i, G.exact)
        cols.append(e - n * (e.dot(G.g.dot(n)) / gnn))
    F = np.array(cols, dtype=object if G.exact else float).T
    omega = interior(n, G.phi)
    return Restriction6(pullback(F, omega), pullback(F, G.phi), F, n)


def cross_J(G: G2Structure, R: Restriction6) -> np.ndarray:
    """Matrix of v -> -n x v on the complement, in the frame of R."""
    cols = []
    for j in range(6):
        w = -cross_product(G, R.normal, R.frame[:, j])
        if G.exact:
            from .linalg import solve
            x = solve(R.frame, w)
        else:
            x = np.linalg.lstsq(R.frame.astype(float), w.astype(float), rcond=None)[0]
        cols.append(x)
    return np.array(cols, dtype=object if G.exact else float).T


def wedge_rank(phi: KForm, k: int) -> int:
    """Rank of beta -> beta ^ phi on Lambda^k."""
    cols = []
    for I in basis(phi.n, k):
        b = KForm.basis_form(phi.n, I, exact=phi.exact)
        if not phi.exact:
            b = b.to_float()
        cols.append(wedge(b, phi).c)
    M = np.array(cols, dtype=object if phi.exact else float).T
    return rank(M)


# ---------------------------------------------------------------------------
# dimension 8

@dataclass
class Spin7Structure:
    Phi: KForm
    g: np.ndarray
    label: str


def lift_to_8(G: G2Structure) -> Spin7Structure:
    phi8 = embed(G.phi, 8)
    psi8 = embed(G.star_phi(), 8)
    one = Fraction(1) if G.exact else 1.0
    e8 = KForm.from_terms(8, [((7,), one)], exact=G.exact)
    Phi = wedge(e8, phi8) + psi8
    g = np.empty((8, 8), dtype=object if G.exact else float)
    g[:, :] = Fraction(0) if G.exact else 0.0
    g[:7, :7] = G.g
    g[7, 7] = one
    label = "Spin(7)" if G.label == "G2" else "Spin0(3,4)"
    return Spin7Structure(Phi, g, label)


def recover_from_8(S8: Spin7Structure) -> KForm:
    e8 = _unit_vec(8, 7, S8.Phi.exact)
    phi8 = interior(e8, S8.Phi)
    idx = {I: v for I, v in zip(basis(8, 3), phi8.c)}
    return KForm(7, 3, np.array([idx[I] for I in basis(7, 3)], dtype=phi8.c.dtype))
