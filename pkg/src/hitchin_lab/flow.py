"""Hitchin-type evolution equations on Lie algebras.

Three flows are covered:

* the parallel flow  rho' = d omega,  sigma' = d hat(rho)   (sigma = omega^2 / 2),
* the nearly half-flat flow  rho' = d omega + lam hat(rho),  sigma' = d hat(rho),
* the cocalibrated flow  (*phi phi)' = d phi  in dimension seven.

States are carried as float coefficient vectors; omega is recovered from sigma
with the orientation fixed at the initial time. Closed-form solutions on
h3 + h3 (affine for omega of orbit type 2..5, the kappa(x) family for type 1)
and the cone / cosine-cone families over nearly (para-)Kaehler structures
serve as oracles for the integrators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import poly as P
from . import scalars as S
from .exterior import FormError, KForm, embed, parse_form, wedge
from .lie import LieAlgebra, classify_two_form, h3h3, omega_normal, product_with_line, rho1
from .stable import (NotNormalized, NotStable, analyze3, g2_structure, hat2, omega_volume, pair_analyze,
                     sqrt_four_form)


class FlowError(FormError):
    pass


class SingularHit(FlowError):
    pass


class DriftExceeded(FlowError):
    pass


class NotNearlyHalfFlat(FlowError):
    pass


class NotNearlyKaehler(FlowError):
    pass


class NotCocalibrated(FlowError):
    pass


class NewtonDiverged(FlowError):
    def __init__(self, msg: str, residual: float):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class WrongOrbit(FlowError):
    pass


class WrongNormalForm(FlowError):
    pass


class OutsideInterval(FlowError):
    pass


# ---------------------------------------------------------------------------
# configuration and state

@dataclass
class FlowConfig:
    kind: str = "parallel"            # parallel | nearly | cocalibrated
    lam: float | None = None          # constant of the nearly half-flat flow
    stepper: str = "rk4"              # rk4 | rk45
    h: float = 1e-3
    drift_tol: float = 1e-8
    singular_guard: float = 1e-6
    rtol: float = 1e-10
    atol: float = 1e-12
    step_floor: float = 1e-8
    raise_on_drift: bool = False

    def __post_init__(self):
        if self.kind not in ("parallel", "nearly", "cocalibrated"):
            raise ValueError(f"unknown flow kind {self.kind!r}")
        if self.kind == "nearly" and not self.lam:
            raise ValueError("the nearly half-flat flow needs a nonzero constant lam")
        if self.stepper not in ("rk4", "rk45"):
            raise ValueError(f"unknown stepper {self.stepper!r}")


@dataclass
class Drift:
    d_rho: float = 0.0
    d_sigma: float = 0.0
    compat: float = 0.0
    normalization: float = 0.0
    nearly: float | None = None

    def worst(self) -> float:
        vals = [self.d_rho, self.d_sigma, self.compat, self.normalization]
        if self.nearly is not None:
            vals.append(self.nearly)
        return max(vals)

    def as_dict(self) -> dict:
        out = {"dRho": self.d_rho, "dSigma": self.d_sigma, "compat": self.compat,
               "normalization": self.normalization}
        if self.nearly is not None:
            out["nearly"] = self.nearly
        return out


@dataclass
class FlowState:
    t: float
    rho: KForm
    sigma: KForm
    omega: KForm
    drift: Drift = field(default_factory=Drift)
    x: float | None = None


def _vec(rho: KForm, sigma: KForm) -> np.ndarray:
    return np.concatenate([rho.to_float().c, sigma.to_float().c])


def _split(y: np.ndarray):
    return KForm(6, 3, np.array(y[:20], dtype=float)), KForm(6, 4, np.array(y[20:], dtype=float))


# ---------------------------------------------------------------------------
# six-dimensional flows

class SixFlow:
    """Parallel or nearly half-flat flow of (rho, sigma) on a 6-dim Lie algebra."""

    def __init__(self, L: LieAlgebra, omega0: KForm, rho0: KForm, cfg: FlowConfig | None = None):
        if L.n != 6:
            raise FlowError("the Hitchin flow acts on 6-dimensional algebras")
        self.L = L
        self.cfg = cfg or FlowConfig()
        if self.cfg.kind == "cocalibrated":
            raise FlowError("use CocalibratedFlow for the 7-dimensional flow")
        vo = omega_volume(omega0)
        if S.is_zero(vo):
            raise NotStable("omega0 is degenerate")
        self.orientation = S.sign(vo)
        pair = pair_analyze(omega0, rho0)
        if not pair.normalized:
            raise NotNormalized("initial pair is not normalized")
        self.lam = float(self.cfg.lam) if self.cfg.kind == "nearly" else 0.0
        rho0f, sig0f = rho0.to_float(), hat2(omega0).to_float()
        if self.cfg.kind == "nearly":
            res = (L.d(rho0f) - sig0f * self.lam).norm_inf()
            if res > 1e-9 * max(1.0, sig0f.norm_inf()):
                raise NotNearlyHalfFlat(f"d rho - lam sigma has size {res:.3e}")
        # d rho - lam sigma is the conserved quantity (plain d rho when lam = 0)
        self.d_rho0 = L.d(rho0f) - sig0f * self.lam
        self.d_sigma0 = L.d(sig0f)
        self.lam0 = abs(float(analyze3(rho0f, self.orientation).lam))
        self.vol0 = abs(float(omega_volume(omega0.to_float())))
        self.y0 = _vec(rho0, hat2(omega0))
        self.omega_seed = omega0.to_float()

    # vector field -----------------------------------------------------------
    def omega_of(self, sigma: KForm) -> KForm:
        try:
            return sqrt_four_form(sigma, self.orientation)
        except FormError as exc:
            raise SingularHit(f"sigma lost stability: {exc}") from exc

    def hat_of(self, rho: KForm):
        try:
            st = analyze3(rho, self.orientation)
        except FormError as exc:
            raise SingularHit(f"rho lost stability: {exc}") from exc
        if abs(float(st.lam)) < self.cfg.singular_guard * self.lam0:
            raise SingularHit("lambda(rho) is approaching zero")
        return st

    def field(self, t: float, y: np.ndarray) -> np.ndarray:
        rho, sigma = _split(y)
        omega = self.omega_of(sigma)
        st = self.hat_of(rho)
        rdot = self.L.d(omega)
        if self.lam:
            rdot = rdot + st.hat * self.lam
        sdot = self.L.d(st.hat)
        return np.concatenate([rdot.c, sdot.c])

    # bookkeeping ------------------------------------------------------------
    def state(self, t: float, y: np.ndarray) -> FlowState:
        rho, sigma = _split(y)
        omega = self.omega_of(sigma)
        st = self.hat_of(rho)
        vo = abs(float(omega_volume(omega)))
        if vo < self.cfg.singular_guard * self.vol0:
            raise SingularHit("phi(omega) is approaching zero")
        dr = drift_of(self.L, rho, sigma, omega, st, self.d_rho0, self.d_sigma0,
                      self.lam if self.lam else None)
        if self.cfg.raise_on_drift and dr.worst() > self.cfg.drift_tol:
            raise DriftExceeded(f"constraint drift {dr.worst():.3e} at t={t}")
        return FlowState(t, rho, sigma, omega, dr)

    def initial(self, t0: float = 0.0) -> FlowState:
        return self.state(t0, self.y0)

    def rk4_step(self, t: float, y: np.ndarray, h: float) -> np.ndarray:
        k1 = self.field(t, y)
        k2 = self.field(t + h / 2, y + h / 2 * k1)
        k3 = self.field(t + h / 2, y + h / 2 * k2)
        k4 = self.field(t + h, y + h * k3)
        return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    def run(self, t_end: float, t0: float = 0.0, h: float | None = None, record_every: int = 1,
            y0: np.ndarray | None = None) -> list:
        """Integrate from t0 to t_end (either direction) and return recorded states."""
        y = self.y0 if y0 is None else y0
        if self.cfg.stepper == "rk45":
            return self._run_rk45(t0, t_end, y)
        h = self.cfg.h if h is None else h
        n = max(1, int(round(abs(t_end - t0) / h)))
        hs = (t_end - t0) / n
        out = [self.state(t0, y)]
        for i in range(1, n + 1):
            y = self.rk4_step(t0 + (i - 1) * hs, y, hs)
            if i % record_every == 0 or i == n:
                out.append(self.state(t0 + i * hs, y))
        return out

    def _run_rk45(self, t0, t_end, y):
        from scipy.integrate import RK45
        solver = RK45(self.field, t0, y, t_end, rtol=self.cfg.rtol, atol=self.cfg.atol,
                      first_step=min(self.cfg.h, abs(t_end - t0)) or None)
        out = [self.state(t0, y)]
        while solver.status == "running":
            solver.step()
            if solver.status == "failed":
                raise SingularHit("adaptive stepper failed")
            if solver.step_size < self.cfg.step_floor and solver.status == "running":
                raise SingularHit(f"step size fell below {self.cfg.step_floor:g} at t={solver.t}")
            out.append(self.state(solver.t, solver.y))
        return out

    def final(self, t_end: float, **kw) -> FlowState:
        return self.run(t_end, record_every=10 ** 9, **kw)[-1]


def drift_of(L, rho, sigma, omega, st, d_rho0, d_sigma0, lam=None) -> Drift:
    phi_rho = math.sqrt(abs(float(st.lam)))
    phi_om = abs(float(omega_volume(omega)))
    out = Drift(
        d_rho=(L.d(rho) - sigma * (lam or 0.0) - d_rho0).norm_inf(),
        d_sigma=(L.d(sigma) - d_sigma0).norm_inf(),
        compat=wedge(omega, rho).norm_inf(),
        normalization=abs(phi_rho - 2 * phi_om),
    )
    if lam is not None:
        out.nearly = (L.d(rho) - sigma * lam).norm_inf()
    return out


def step_parallel(L: LieAlgebra, s: FlowState, cfg: FlowConfig | None = None) -> FlowState:
    """One fixed RK4 step of the parallel flow starting at state s."""
    cfg = cfg or FlowConfig()
    fl = SixFlow(L, s.omega, s.rho, FlowConfig(**{**cfg.__dict__, "kind": "parallel"}))
    y = fl.rk4_step(s.t, _vec(s.rho, s.sigma), cfg.h)
    return fl.state(s.t + cfg.h, y)


def step_nearly(L: LieAlgebra, s: FlowState, cfg: FlowConfig) -> FlowState:
    """One fixed RK4 step of the nearly half-flat system with constant cfg.lam."""
    fl = SixFlow(L, s.omega, s.rho, FlowConfig(**{**cfg.__dict__, "kind": "nearly"}))
    y = fl.rk4_step(s.t, _vec(s.rho, s.sigma), cfg.h)
    return fl.state(s.t + cfg.h, y)


def trajectory_records(states: list, x_of: Callable | None = None) -> list:
    """JSON-lines style records, one per state."""
    from .exterior import form_to_json
    out = []
    for s in states:
        rec = {"t": S.format_float(s.t)}
        if x_of is not None:
            rec["x"] = S.format_float(x_of(s))
        rec["rho"] = form_to_json(s.rho)
        rec["sigma"] = form_to_json(s.sigma)
        rec["drift"] = {k: S.format_float(v) for k, v in s.drift.as_dict().items()}
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# h3 + h3: affine solutions (omega of type 2..5)

E12F12 = (0, 1, 3, 4)
E1F1 = (0, 3)


@dataclass
class AffineTrajectory:
    L: LieAlgebra
    omega0: KForm
    rho0: KForm
    d_omega0: KForm
    d_hat0: KForm
    orientation: int
    orbit: int

    def rho(self, t) -> KForm:
        return self.rho0 + self.d_omega0 * t

    def sigma(self, t) -> KForm:
        return hat2(self.omega0) + self.d_hat0 * t

    def y(self, t):
        """sigma(t) = sigma_0 + y(t) e^{12}f^{12}."""
        return self.d_hat0[E12F12] * t

    def omega(self, t) -> KForm:
        """omega_0 - y(t) e^1 f^1."""
        y = self.y(t)
        return self.omega0 - KForm.basis_form(6, E1F1, exact=self.omega0.exact) * y \
            if S.is_exact(y) or not self.omega0.exact else self.omega0.to_float() - KForm.basis_form(6, E1F1, False) * y

    def check(self, t) -> dict:
        """Residuals of the claims made about the affine solution at time t."""
        rho, om = self.rho(t), self.omega(t)
        st0 = analyze3(self.rho0, self.orientation)
        st = analyze3(rho, self.orientation)
        sig = self.sigma(t)
        diff = lambda a, b: (a - b).norm_inf() if not (a.exact and b.exact) else (0.0 if a == b else (a - b).to_float().norm_inf())
        return {
            "lambda_constant": abs(S.to_float(st.lam) - S.to_float(st0.lam)) if not (S.is_exact(st.lam) and S.is_exact(st0.lam))
            else (0.0 if st.lam == st0.lam else abs(float(st.lam - st0.lam))),
            "d_hat_constant": diff(self.L.d(st.hat), self.d_hat0),
            "sigma_is_omega_squared": diff(hat2(om), sig),
            "compat": wedge(om, rho).to_float().norm_inf(),
        }


def evolve_affine(omega0: KForm, rho0: KForm, L: LieAlgebra | None = None) -> AffineTrajectory:
    """Closed-form solution sigma_0 + t d hat(rho_0), rho_0 + t d omega_0 for omega of type 2..5."""
    L = L or h3h3()
    cls = classify_two_form(omega0, L)
    if cls.kind == 1:
        raise WrongOrbit("omega has a nonzero kappa_1 component; use kappa_solution")
    pair = pair_analyze(omega0, rho0)
    d_hat0 = L.d(pair.hat)
    other = [(I, v) for I, v in d_hat0.terms() if I != E12F12]
    if other:
        raise FlowError("d hat(rho_0) is not a multiple of e^{12}f^{12}")
    return AffineTrajectory(L, omega0, rho0, L.d(omega0), d_hat0, pair.orientation, cls.kind)


# ---------------------------------------------------------------------------
# h3 + h3: the kappa(x) solution (omega of type 1)

DIRECTION = "e12f3 - e3f12"
# x runs against the flow: rho(x) = rho_0 - x (e12f3 - e3f12) and dt/dx = -(1/2) sqrt(eps kappa).
# This is the coordinate in which kappa(x) and g(x) of the three standard examples take their usual form.
X_SIGN = -1


def integrate(f, a: float, b: float, tol: float = 1e-13) -> float:
    """QUADPACK quadrature; copes with the sqrt-type endpoint behaviour of dt/dx."""
    if a == b:
        return 0.0
    val, _ = quad(f, a, b, epsabs=tol, epsrel=tol, limit=400)
    return float(val)


@dataclass
class KappaSolution:
    a: list | None
    omega0: KForm
    rho0: KForm
    kappa: list                 # exact coefficients, low degree first
    interval: tuple             # (lo, hi); None stands for -inf / +inf
    epsilon: int
    orientation: int
    sign: int = X_SIGN

    # -- polynomial --------------------------------------------------------
    def kappa_at(self, x):
        return P.evaluate(self.kappa, x)

    def kappa_string(self) -> str:
        return P.to_string(self.kappa)

    def inside(self, x) -> bool:
        lo, hi = self.interval
        xf = S.to_float(x)
        return (lo is None or xf > S.to_float(lo)) and (hi is None or xf < S.to_float(hi))

    def _need(self, x):
        if not self.inside(x):
            raise OutsideInterval(f"x = {S.format_scalar(x)} lies outside the kappa interval")

    # -- structures ---------------------------------------------------------
    def rho(self, x) -> KForm:
        d = parse_form(DIRECTION, 6) * self.sign
        r = self.rho0 if S.is_exact(x) else self.rho0.to_float()
        return r + (d if S.is_exact(x) else d.to_float()) * x

    def _tilde(self, x) -> KForm:
        """omega(x) up to the factor 2 (eps kappa)^(-1/2)."""
        q = self.epsilon * self.kappa_at(x) / 4
        one = Fraction(1) if S.is_exact(x) else 1.0
        return KForm.from_terms(6, [((0, 3), q), ((1, 4), q), ((2, 5), one)], exact=S.is_exact(x))

    def root(self, x):
        """sqrt(eps kappa(x)); exact when it stays in the field."""
        self._need(x)
        return S.sqrt_any(self.epsilon * self.kappa_at(x))

    def omega(self, x) -> KForm:
        r = self.root(x)
        om = self._tilde(x)
        if S.is_exact(r):
            return om * (2 / r)
        return om.to_float() * (2 / float(r))

    def sigma(self, x) -> KForm:
        return hat2(self.omega(x))

    def g(self, x) -> np.ndarray:
        """Induced metric, computed without square roots: g = (2 / kappa) W~ K."""
        self._need(x)
        from .stable import K_matrix
        rho = self.rho(x)
        K = K_matrix(rho, self.orientation)
        W = self._tilde(x).as_matrix()
        k = self.kappa_at(x)
        G = W.dot(K)
        if S.is_exact(x):
            return G * (2 / k)
        return np.asarray(G, dtype=float) * (2 / float(k))

    def phi(self, x) -> KForm:
        """phi = omega ^ dt + rho = sign (1/2) sqrt(eps kappa) omega(x) ^ dx + rho(x) on M x I (dx last)."""
        r = self.root(x)
        om = self.omega(x)
        rho = self.rho(x)
        exact = S.is_exact(r) and om.exact
        if not exact:
            om, rho, r = om.to_float(), rho.to_float(), float(r)
        dx = KForm.from_terms(7, [((6,), Fraction(1) if exact else 1.0)], exact=exact)
        half = Fraction(self.sign, 2) if exact else 0.5 * self.sign
        return wedge(embed(om, 7), dx) * (half * r) + embed(rho, 7)

    def g_phi(self, x) -> np.ndarray:
        """g(x) - (1/4) kappa(x) dx^2."""
        g6 = self.g(x)
        exact = g6.dtype == object
        out = np.empty((7, 7), dtype=object if exact else float)
        out[:, :] = Fraction(0) if exact else 0.0
        out[:6, :6] = g6
        k = self.kappa_at(x)
        out[6, 6] = -k / 4 if exact else -float(k) / 4
        return out

    # -- time parametrization ----------------------------------------------
    def speed(self, x: float) -> float:
        """dt/dx = sign (1/2) sqrt(eps kappa(x))."""
        return 0.5 * self.sign * math.sqrt(max(self.epsilon * float(S.to_float(self.kappa_at(x))), 0.0))

    def _kf(self):
        if not hasattr(self, "_kfloat"):
            self._kfloat = [S.to_float(c) for c in self.kappa]
        return self._kfloat

    def _speed_f(self, x: float) -> float:
        v = 0.0
        for c in reversed(self._kf()):
            v = v * x + c
        return 0.5 * self.sign * math.sqrt(max(self.epsilon * v, 0.0))

    def t_of_x(self, x: float, tol: float = 1e-13) -> float:
        self._need(x)
        return integrate(self._speed_f, 0.0, float(S.to_float(x)), tol)

    def x_of_t(self, t: float, tol: float = 1e-14) -> float:
        """Invert t(x) by a bracketing root finder inside the interval."""
        if t == 0:
            return 0.0
        lo, hi = self.interval
        a = float(S.to_float(lo)) if lo is not None else -1.0
        b = float(S.to_float(hi)) if hi is not None else 1.0
        up = lambda u: self.sign * self.t_of_x(u)      # increasing in u
        target = self.sign * t
        if lo is None:
            while up(a) > target:
                a *= 2
        if hi is None:
            while up(b) < target:
                b *= 2
        # stay strictly inside the open interval
        a = a if lo is None else a + 1e-15 * max(1.0, abs(a))
        b = b if hi is None else b - 1e-15 * max(1.0, abs(b))
        ta, tb = up(a), up(b)
        if not ta <= target <= tb:
            raise OutsideInterval(f"t = {t} is beyond the maximal time interval")
        if ta == target:
            return a
        if tb == target:
            return b
        return float(brentq(lambda u: up(u) - target, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))

    def at_time(self, t: float):
        """(x, rho, sigma) of the closed-form solution at flow time t."""
        x = self.x_of_t(t)
        return x, self.rho(x), self.sigma(x)

    def as_dict(self) -> dict:
        lo, hi = self.interval
        fmt = lambda v: "-inf" if v is None and v is lo else ("inf" if v is None else S.format_scalar(v))
        return {
            "kappa": self.kappa_string(),
            "kappa_coefficients": [S.format_scalar(c) for c in self.kappa],
            "epsilon": self.epsilon,
            "interval": ["-inf" if lo is None else S.format_scalar(lo), "inf" if hi is None else S.format_scalar(hi)],
        }


def kappa_polynomial(rho0: KForm, sign: int = X_SIGN) -> list:
    """kappa(x) = lambda(rho_0 + sign x (e12f3 - e3f12)), by exact interpolation at x = 0..4."""
    from .stable import lam
    d = parse_form(DIRECTION, 6) * sign
    xs = [Fraction(i) for i in range(5)]
    ys = [lam(rho0 + d * x) for x in xs]
    k = P.interpolate(xs, ys)
    if lam(rho0 + d * 7) != P.evaluate(k, 7):
        raise FlowError("lambda along the line is not a quartic")
    return k


def kappa_solution(a=None, rho0: KForm | None = None, omega0: KForm | None = None) -> KappaSolution:
    """Closed-form evolution of a normalized half-flat pair with omega_0 = e1f1 + e2f2 + e3f3."""
    om1 = omega_normal(1)
    omega0 = om1 if omega0 is None else omega0
    if omega0 != om1:
        raise WrongNormalForm("omega_0 must equal e1f1 + e2f2 + e3f3")
    if rho0 is None:
        if a is None:
            raise ValueError("give the nine parameters a or rho0")
        rho0 = rho1(a)
    if not rho0.exact:
        raise FlowError("kappa_solution needs exact input")
    pair = pair_analyze(omega0, rho0)
    L = h3h3()
    if not L.d(rho0).is_zero():
        raise FlowError("rho_0 is not closed")
    if not pair.normalized:
        raise NotNormalized("phi(rho_0) != 2 phi(omega_0)")
    k = kappa_polynomial(rho0)
    eps = pair.epsilon
    if P.evaluate(k, 0) != 4 * eps:
        raise NotNormalized("kappa(0) != 4 eps")
    roots = P.real_roots(k)
    neg = [r for r in roots if S.to_float(r) < 0]
    pos = [r for r in roots if S.to_float(r) > 0]
    interval = (max(neg, key=S.to_float) if neg else None, min(pos, key=S.to_float) if pos else None)
    return KappaSolution(a, omega0, rho0, k, interval, eps, pair.orientation)


# ---------------------------------------------------------------------------
# families of forms depending polynomially on a parameter

def polynomial_family(fn: Callable, degree: int) -> list:
    """Coefficient forms F_k with fn(t) = sum t^k F_k, by exact interpolation at t = 0..degree."""
    ts = [Fraction(i) for i in range(degree + 1)]
    vals = [fn(t) for t in ts]
    n, k = vals[0].n, vals[0].k
    coeffs = []
    comps = np.array([v.c for v in vals], dtype=object).T
    per_comp = [P.interpolate(ts, list(col)) for col in comps]
    for p in range(degree + 1):
        c = np.empty(len(per_comp), dtype=object)
        for i, pc in enumerate(per_comp):
            c[i] = pc[p] if p < len(pc) else Fraction(0)
        coeffs.append(KForm(n, k, c))
    check = Fraction(degree + 3)
    tot = sum((F * check ** p for p, F in enumerate(coeffs)), KForm.zero(n, k))
    if tot != fn(check):
        raise FlowError("family is not polynomial of the stated degree")
    return coeffs


def extended_d_poly(L: LieAlgebra, coeffs: list) -> list:
    """d-hat (sum t^k F_k) on g + R (t last) = sum t^k (d F_k + (k+1) dt ^ F_{k+1})."""
    n = L.n + 1
    Lx = product_with_line(L)
    dt = KForm.from_terms(n, [((n - 1,), Fraction(1))])
    out = []
    for k, F in enumerate(coeffs):
        term = Lx.d(F)
        if k + 1 < len(coeffs):
            term = term + wedge(dt, coeffs[k + 1]) * (k + 1)
        out.append(term)
    return out


def extended_d(L: LieAlgebra, F: KForm, dF_dt: KForm) -> KForm:
    """d-hat F = d_CE F + dt ^ dF/dt for a form on g + R at one time."""
    n = L.n + 1
    Lx = product_with_line(L)
    dt = KForm.from_terms(n, [((n - 1,), 1.0)], exact=False)
    return Lx.d(F.to_float()) + wedge(dt, dF_dt.to_float())


def richardson_derivative(fn: Callable, t: float, h: float = 1e-3) -> KForm:
    """Central difference with one Richardson step (fourth order)."""
    d1 = (fn(t + h) - fn(t - h)) * (1 / (2 * h))
    d2 = (fn(t + h / 2) - fn(t - h / 2)) * (1 / h)
    return (d2 * 4 - d1) * (1 / 3)


# ---------------------------------------------------------------------------
# nearly (para-)Kaehler structures and their cones

def nk_residuals(L: LieAlgebra, omega: KForm, rho: KForm) -> dict:
    pair = pair_analyze(omega, rho)
    r1 = L.d(omega) - rho * 3
    r2 = L.d(pair.hat) - hat2(omega) * 4
    f = lambda a: 0.0 if a.exact and a.is_zero() else a.to_float().norm_inf()
    return {"nk1": f(r1), "nk2": f(r2), "normalized": pair.normalized}


def require_nk(L, omega, rho, tol=1e-10):
    res = nk_residuals(L, omega, rho)
    if res["nk1"] > tol or res["nk2"] > tol or not res["normalized"]:
        raise NotNearlyKaehler(f"residuals d omega - 3 rho: {res['nk1']:.3e}, "
                               f"d hat rho - 4 hat omega: {res['nk2']:.3e}, normalized: {res['normalized']}")
    return res


def nk_fixture() -> tuple:
    """Nearly Kaehler SU(3)-structure on su(2) + su(2).

    Ansatz omega = a (e1f1 + e2f2 + e3f3), rho = d omega / 3 with structure constants
    d e^i = e^{jk}. Normalization and d hat(rho) = 4 hat(omega) both reduce to
    s^2 = 6 sqrt3 a for structure-constant scale s; with s = 1, a = sqrt3 / 18.
    """
    from .lie import su2su2
    L = su2su2(1)
    a = S.Quad(0, Fraction(1, 18), 3)
    omega = omega_normal(1) * a
    rho = L.d(omega) * Fraction(1, 3)
    return L, omega, rho


@dataclass
class ConeFamily:
    """omega = t^2 omega_0, rho = t^3 rho_0 and phi = omega ^ dt + rho on g + R."""
    L: LieAlgebra
    omega0: KForm
    rho0: KForm
    epsilon: int
    hat0: KForm

    def pair(self, t):
        return self.omega0 * (t * t), self.rho0 * (t * t * t)

    def phi(self, t) -> KForm:
        om, rho = self.pair(t)
        return _lift(om, rho, om.exact)

    def star_phi(self, t) -> KForm:
        """*phi = eps (hat(rho) ^ dt - sigma)."""
        om = self.omega0 * (t * t)
        hat = self.hat0 * (t * t * t)
        return _star_lift(om, hat, self.epsilon, om.exact)

    def closedness(self) -> dict:
        """Exact d-hat of phi and *phi as polynomials in t."""
        dphi = extended_d_poly(self.L, polynomial_family(self.phi, 3))
        dstar = extended_d_poly(self.L, polynomial_family(self.star_phi, 4))
        return {"dphi_zero": all(c.is_zero() for c in dphi), "dstar_zero": all(c.is_zero() for c in dstar)}


def _lift(om, rho, exact) -> KForm:
    one = Fraction(1) if exact else 1.0
    dt = KForm.from_terms(7, [((6,), one)], exact=exact)
    return wedge(embed(om, 7), dt) + embed(rho, 7)


def _star_lift(om, hat, eps, exact) -> KForm:
    one = Fraction(1) if exact else 1.0
    dt = KForm.from_terms(7, [((6,), one)], exact=exact)
    return (wedge(embed(hat, 7), dt) - embed(hat2(om), 7)) * eps


def cone_family(L: LieAlgebra, omega0: KForm, rho0: KForm) -> ConeFamily:
    require_nk(L, omega0, rho0)
    pair = pair_analyze(omega0, rho0)
    return ConeFamily(L, omega0, rho0, pair.epsilon, pair.hat)


@dataclass
class CosineConeFamily:
    """omega = c^2 omega_0, rho = -c^3 (s rho_0 + c hat(rho_0)) with (c, s) = (cos t, sin t),
    or (cosh t, sinh t) in the para-complex case."""
    L: LieAlgebra
    omega0: KForm
    rho0: KForm
    epsilon: int
    hat0: KForm

    @property
    def mu(self) -> int:
        return 4 * self.epsilon

    @property
    def lam(self) -> int:
        """Constant of the induced nearly half-flat family (-eps mu)."""
        return -4

    def _cs(self, t):
        if self.epsilon < 0:
            return math.cos(t), math.sin(t), -math.sin(t), math.cos(t)
        return math.cosh(t), math.sinh(t), math.sinh(t), math.cosh(t)

    def omega(self, t) -> KForm:
        c, _, _, _ = self._cs(t)
        return self.omega0.to_float() * (c * c)

    def rho(self, t) -> KForm:
        c, s, _, _ = self._cs(t)
        return (self.rho0.to_float() * s + self.hat0.to_float() * c) * (-c ** 3)

    def rho_dot(self, t) -> KForm:
        c, s, dc, ds = self._cs(t)
        inner = self.rho0.to_float() * s + self.hat0.to_float() * c
        dinner = self.rho0.to_float() * ds + self.hat0.to_float() * dc
        return inner * (-3 * c * c * dc) + dinner * (-c ** 3)

    def omega_dot(self, t) -> KForm:
        c, _, dc, _ = self._cs(t)
        return self.omega0.to_float() * (2 * c * dc)

    def phi(self, t) -> KForm:
        return _lift(self.omega(t), self.rho(t), False)

    def phi_dot(self, t) -> KForm:
        return _lift(self.omega_dot(t), self.rho_dot(t), False)

    def residual(self, t) -> float:
        """|| d-hat phi - mu *phi phi || with the Hodge star computed from phi itself."""
        phi = self.phi(t)
        G = g2_structure(phi)
        dphi = extended_d(self.L, phi, self.phi_dot(t))
        return (dphi - G.star_phi() * self.mu).norm_inf()


def cosine_cone_family(L: LieAlgebra, omega0: KForm, rho0: KForm) -> CosineConeFamily:
    require_nk(L, omega0, rho0)
    pair = pair_analyze(omega0, rho0)
    return CosineConeFamily(L, omega0, rho0, pair.epsilon, pair.hat)


# ---------------------------------------------------------------------------
# cocalibrated flow in dimension seven

def star_phi(phi: KForm) -> KForm:
    return g2_structure(phi.to_float()).star_phi()


def recover_phi(psi: KForm, seed: KForm, tol: float = 1e-13, max_iter: int = 50,
                fd_step: float = 1e-5, stall_tol: float = 1e-10) -> KForm:
    """Solve *phi phi = psi for phi near seed by damped Newton with a central-difference Jacobian.

    When no step along the Newton direction decreases the residual any more, the
    iterate is accepted if its relative residual is below ``stall_tol`` (the
    round-off floor of evaluating *phi phi), otherwise NewtonDiverged is raised.
    """
    x = seed.to_float().c.copy()
    target = psi.to_float().c
    scale = max(1.0, float(np.max(np.abs(target))))

    def F(v):
        return star_phi(KForm(7, 3, v)).c - target

    r = F(x)
    res = float(np.max(np.abs(r)))
    for _ in range(max_iter):
        if res <= tol * scale:
            return KForm(7, 3, x)
        J = np.empty((35, 35))
        for j in range(35):
            xp, xm = x.copy(), x.copy()
            hj = fd_step * max(1.0, abs(x[j]))
            xp[j] += hj
            xm[j] -= hj
            J[:, j] = (F(xp) - F(xm)) / (2 * hj)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise NewtonDiverged("singular Jacobian", res)
        step = 1.0
        while step > 1e-4:
            try:
                xn = x + step * dx
                rn = F(xn)
                rn_res = float(np.max(np.abs(rn)))
            except FormError:
                rn_res = math.inf
            if rn_res < res:
                break
            step /= 2
        else:
            if res <= stall_tol * scale:
                return KForm(7, 3, x)
            raise NewtonDiverged("no descent along the Newton direction", res)
        x, r, res = xn, rn, rn_res
    if res <= tol * scale * 10:
        return KForm(7, 3, x)
    raise NewtonDiverged("iteration limit reached", res)


class CocalibratedFlow:
    """(*phi phi)' = d phi on a 7-dimensional Lie algebra, psi = *phi phi as state."""

    def __init__(self, L: LieAlgebra, phi0: KForm, h: float = 1e-3, tol: float = 1e-9):
        if L.n != 7:
            raise FlowError("the cocalibrated flow acts on 7-dimensional algebras")
        self.L = L
        self.h = h
        psi0 = star_phi(phi0)
        res = L.d(psi0).norm_inf()
        if res > tol * max(1.0, psi0.norm_inf()):
            raise NotCocalibrated(f"d *phi has size {res:.3e}")
        self.phi0 = phi0.to_float()
        self.psi0 = psi0

    def field(self, psi: KForm, seed: KForm):
        phi = recover_phi(psi, seed)
        return self.L.d(phi), phi

    def step(self, psi: KForm, phi: KForm, h: float | None = None):
        h = self.h if h is None else h
        k1, p1 = self.field(psi, phi)
        k2, p2 = self.field(psi + k1 * (h / 2), p1)
        k3, p3 = self.field(psi + k2 * (h / 2), p2)
        k4, _ = self.field(psi + k3 * h, p3)
        psi_n = psi + (k1 + k2 * 2 + k3 * 2 + k4) * (h / 6)
        return psi_n, recover_phi(psi_n, p3)

    def run(self, t_end: float, h: float | None = None) -> list:
        h = self.h if h is None else h
        n = max(1, int(round(abs(t_end) / h)))
        hs = t_end / n
        psi, phi = self.psi0, self.phi0
        out = [(0.0, phi, psi)]
        for i in range(1, n + 1):
            psi, phi = self.step(psi, phi, hs)
            out.append((i * hs, phi, psi))
        return out

    def cocalibration(self, psi: KForm) -> float:
        return self.L.d(psi).norm_inf()


def step_cocalibrated(L: LieAlgebra, phi: KForm, h: float = 1e-3) -> KForm:
    fl = CocalibratedFlow(L, phi, h)
    return fl.step(fl.psi0, fl.phi0)[1]


def spin_form_residual(L: LieAlgebra, traj: list) -> float:
    """d-hat of Phi = dt ^ phi + *phi phi along a recorded cocalibrated trajectory.

    The t-derivative of psi is taken from the flow itself, so the residual is
    d psi (spatial) together with dt ^ (psi' - d phi) evaluated by central differences.
    """
    worst = 0.0
    for i in range(1, len(traj) - 1):
        t0, _, psi0 = traj[i - 1]
        t1, phi1, psi1 = traj[i]
        t2, _, psi2 = traj[i + 1]
        dpsi = (psi2 - psi0) * (1 / (t2 - t0))
        worst = max(worst, L.d(psi1).norm_inf(), (dpsi - L.d(phi1)).norm_inf())
    return worst


def cone_over_nearly_parallel(L: LieAlgebra, phi0: Callable, dphi0: Callable, t: float, s: float,
                              mu: float = 4.0, h: float = 1e-3) -> dict:
    """Closedness of Phi = ds ^ s^3 phi_0 + s^4 *phi_0 on (g + R_t) + R_s.

    phi0(t) is a family on g + R whose extended differential uses dt ^ d/dt; the
    t-derivative of *phi_0 is taken by Richardson-extrapolated central differences.
    Returns the residual of d-hat Phi and of the nearly parallel equation.
    """

    ph = phi0(t).to_float()
    st = star_phi(ph)
    dph = extended_d(L, ph, dphi0(t))
    dst = extended_d(L, st, richardson_derivative(lambda u: star_phi(phi0(u)), t, h))
    n8 = L.n + 2
    ds = KForm.from_terms(n8, [((n8 - 1,), 1.0)], exact=False)
    e = lambda a: embed(a, n8)
    dPhi = (wedge(ds, e(dph)) * (-s ** 3) + e(dst) * s ** 4 + wedge(ds, e(st)) * (4 * s ** 3))
    return {"dPhi": dPhi.norm_inf(), "nearly": (dph - st * mu).norm_inf()}
