"""Chart metrics on H3 x H3 (x R), numerical Riemann tensors and holonomy verdicts.

Coordinates are (x1, x2, x3, y1, y2, y3) and, for the seven-dimensional
metrics, a last coordinate x (the kappa parameter) or r (after conformal
completion). The left-invariant coframe is

    e1 = dx1, e2 = dx2, e3 = dx3 + x1 dx2,  f1 = dy1, f2 = dy2, f3 = dy3 + y1 dy2.

Derivatives are central differences with one Richardson step. Christoffel
symbols use a small inner step; their derivatives use a coarser outer step
so that round-off from the inner difference is not amplified twice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from . import scalars as S
from .exterior import FormError
from .flow import KappaSolution, OutsideInterval


class IllConditioned(FormError):
    """Singular values of the curvature operator show no usable gap."""


class NotADiffeo(FormError):
    """The proposed reparametrization is not a diffeomorphism onto the interval."""


class Inconclusive(FormError):
    """Sampled curvature data fit none of the recognised verdicts."""


RANK_GAP = 1e3
ILL_GAP = 10.0
INNER_STEP = 1e-5
OUTER_STEP = 1e-3
NABLA_STEP = 1e-2


@dataclass
class ChartMetric:
    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    chart_info: str
    inside: Callable[[np.ndarray], bool] | None = None

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.inside is not None and not self.inside(p):
            raise OutsideInterval(f"point {p.tolist()} is outside the chart domain")
        return self.eval(p)


def coframe(p) -> np.ndarray:
    """Rows: e1..f3 in terms of dx1..dy3 at the point p."""
    E = np.eye(6)
    E[2, 1] = p[0]
    E[5, 4] = p[3]
    return E


def _algebraic_to_chart(G: np.ndarray, p) -> np.ndarray:
    E = coframe(p)
    return E.T @ G @ E


def chart_from_h3h3(source, x_sign: int = 1) -> ChartMetric:
    """Chart metric for a fixed algebraic metric (6-dim) or a kappa family (7-dim, x last).

    ``source`` is either a 6x6 symmetric matrix in the basis e1..f3, an object
    with a ``g`` matrix attribute (a StablePair), or a KappaSolution.
    """
    if isinstance(source, KappaSolution):
        ks = source

        def ev(p):
            x = float(p[6])
            out = np.zeros((7, 7))
            out[:6, :6] = _algebraic_to_chart(np.asarray(ks.g(x), dtype=float), p)
            out[6, 6] = -float(S.to_float(ks.kappa_at(x))) / 4
            return out

        return ChartMetric(7, ev, "coframe substitution on H3xH3, g(x) - kappa(x)/4 dx^2",
                           lambda p: ks.inside(float(p[6])))
    G = getattr(source, "g", source)
    G = np.array([[S.to_float(v) for v in row] for row in np.asarray(G)], dtype=float)
    if G.shape != (6, 6) or not np.allclose(G, G.T):
        raise FormError("expected a symmetric 6x6 metric")
    return ChartMetric(6, lambda p: _algebraic_to_chart(G, p), "coframe substitution on H3xH3")


def flat_chart(signature=(6, 0)) -> ChartMetric:
    p, q = signature
    G = np.diag([1.0] * p + [-1.0] * q)
    return ChartMetric(p + q, lambda x: G.copy(), "constant metric")


# ---------------------------------------------------------------------------
# differences

def _richardson(fn: Callable, p: np.ndarray, i: int, h: float):
    def central(step):
        a, b = p.copy(), p.copy()
        a[i] += step
        b[i] -= step
        return (fn(a) - fn(b)) / (2 * step)
    return (4 * central(h / 2) - central(h)) / 3


def metric_derivatives(cm: ChartMetric, p, h: float = INNER_STEP) -> np.ndarray:
    """dg[k, i, j] = d_k g_ij."""
    p = np.asarray(p, dtype=float)
    return np.array([_richardson(cm, p, k, h) for k in range(cm.dim)])


def christoffel(cm: ChartMetric, p, h: float = INNER_STEP) -> np.ndarray:
    """Gamma[a, i, j] of the Levi-Civita connection."""
    g = cm(p)
    dg = metric_derivatives(cm, p, h)
    first = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg)
    # first[k, i, j] = (d_i g_jk + d_j g_ik - d_k g_ij) / 2
    return np.einsum("ak,kij->aij", np.linalg.inv(g), first)


def _riemann_up(cm, p, h_in, h_out):
    """R^a_{bcd} with R(d_c, d_d) d_b = R^a_{bcd} d_a."""
    G = christoffel(cm, p, h_in)
    dG = np.array([_richardson(lambda q: christoffel(cm, q, h_in), np.asarray(p, float), k, h_out)
                   for k in range(cm.dim)])
    # dG[c, a, d, b] = d_c Gamma^a_{db}
    R = (np.einsum("cadb->abcd", dG) - np.einsum("dacb->abcd", dG)
         + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    return R, G


def riemann_lower(cm: ChartMetric, p, h_in: float = INNER_STEP, h_out: float = OUTER_STEP) -> np.ndarray:
    R, _ = _riemann_up(cm, p, h_in, h_out)
    return np.einsum("ae,ebcd->abcd", cm(p), R)


def pairs(n: int) -> list:
    return list(combinations(range(n), 2))


def curvature_operator(Rup: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Matrix of d_c ^ d_d -> sum_{a<b} R^{ab}_{cd} d_a ^ d_b on the pair basis."""
    Rraised = np.einsum("be,aecd->abcd", np.linalg.inv(g), Rup)      # R^{ab}_{cd}
    P = pairs(g.shape[0])
    return np.array([[Rraised[a, b, c, d] for (c, d) in P] for (a, b) in P])


def rank_by_gap(M: np.ndarray, flat_tol: float = 1e-7, noise: float = 1e-15) -> tuple:
    """(rank, gap ratio, singular values); the gap ratio is inf for an exactly separated spectrum.

    ``noise`` is the relative round-off level of M; singular values below it never count.
    """
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] < flat_tol:
        return 0, math.inf, s
    floor = s[0] * noise
    ratios = [s[i] / max(s[i + 1], floor) for i in range(len(s) - 1)]
    ratios.append(s[-1] / floor if s[-1] > floor else 0.0)
    r = int(np.argmax(ratios))
    return r + 1, float(ratios[r]), s


@dataclass
class CurvatureReport:
    point: list
    riemann: np.ndarray          # R_{abcd}
    operator: np.ndarray         # curvature operator on the pair basis
    operator_rank: int
    gap: float
    singular_values: list
    ricci_norm: float
    bianchi: float
    symmetry: float
    parallel_residual: float | None = None
    verdict: str = "Inconclusive"
    fd_step: float = INNER_STEP

    def as_dict(self) -> dict:
        fmt = S.format_float
        return {
            "point": [fmt(v) for v in self.point],
            "operatorRank": self.operator_rank,
            "gap": "inf" if math.isinf(self.gap) else fmt(self.gap),
            "singularValues": [fmt(v) for v in self.singular_values],
            "ricciNorm": fmt(self.ricci_norm),
            "bianchi": fmt(self.bianchi),
            "parallelResidual": None if self.parallel_residual is None else fmt(self.parallel_residual),
            "verdict": self.verdict,
            "fdStep": fmt(self.fd_step),
        }


def riemann(cm: ChartMetric, p, fd_step: float = INNER_STEP, outer_step: float = OUTER_STEP,
            parallel: bool = False, flat_tol: float = 1e-7) -> CurvatureReport:
    p = np.asarray(p, dtype=float)
    g = cm(p)
    Rup, G = _riemann_up(cm, p, fd_step, outer_step)
    Rl = np.einsum("ae,ebcd->abcd", g, Rup)
    ric = np.einsum("abad->bd", Rup)
    bianchi = float(np.max(np.abs(Rl + np.einsum("acdb->abcd", Rl) + np.einsum("adbc->abcd", Rl))))
    symmetry = float(max(np.max(np.abs(Rl + np.einsum("bacd->abcd", Rl))),
                         np.max(np.abs(Rl - np.einsum("cdab->abcd", Rl)))))
    op = curvature_operator(Rup, g)
    # nested differences lose about u / (h_in h_out) relative accuracy
    rank, gap, s = rank_by_gap(op, flat_tol, noise=max(1e-15, 10 * np.finfo(float).eps / (fd_step * outer_step)))
    if gap < ILL_GAP:
        raise IllConditioned(f"singular value gap {gap:.3g} at {p.tolist()}")
    rep = CurvatureReport(p.tolist(), Rl, op, rank, gap, s.tolist(), float(np.max(np.abs(ric))),
                          bianchi, symmetry, fd_step=fd_step)
    if parallel:
        rep.parallel_residual = nabla_riemann(cm, p, fd_step, outer_step, Rl=Rl, G=G)
    rep.verdict = _point_verdict(rep, cm.dim)
    return rep


def nabla_riemann(cm: ChartMetric, p, fd_step: float = INNER_STEP, outer_step: float = OUTER_STEP,
                  h: float = NABLA_STEP, Rl=None, G=None) -> float:
    """max |nabla_e R_{abcd}|, with d_e R from Richardson differences of the lowered tensor."""
    p = np.asarray(p, dtype=float)
    if Rl is None or G is None:
        Rup, G = _riemann_up(cm, p, fd_step, outer_step)
        Rl = np.einsum("ae,ebcd->abcd", cm(p), Rup)
    dR = np.array([_richardson(lambda q: riemann_lower(cm, q, fd_step, outer_step), p, e, h)
                   for e in range(cm.dim)])
    nab = (dR - np.einsum("fea,fbcd->eabcd", G, Rl) - np.einsum("feb,afcd->eabcd", G, Rl)
           - np.einsum("fec,abfd->eabcd", G, Rl) - np.einsum("fed,abcf->eabcd", G, Rl))
    return float(np.max(np.abs(nab)))


def _point_verdict(rep: CurvatureReport, dim: int, tol: float = 1e-5) -> str:
    if rep.operator_rank == 0:
        return "Flat"
    if rep.gap < RANK_GAP:
        return "Inconclusive"
    if rep.operator_rank == 1 and rep.ricci_norm < tol and (rep.parallel_residual is None or rep.parallel_residual < tol):
        return "SymmetricRank1"
    if dim == 7 and rep.operator_rank == 14 and rep.ricci_norm < tol:
        return "HolonomyFullG2kind"
    return "Inconclusive"


def sample_points(dim: int, count: int = 5, offset: float = 0.37, spread: float = 0.11,
                  last: tuple | None = None, seed: int = 0) -> list:
    """Generic points near (offset, ..., offset); the last coordinate may be confined to an interval."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        p = offset + spread * rng.uniform(-1, 1, dim)
        if last is not None:
            lo, hi = last
            p[-1] = lo + (hi - lo) * rng.uniform(0.25, 0.75)
        pts.append(p)
    return pts


@dataclass
class Certificate:
    verdict: str
    reports: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "points": [r.as_dict() for r in self.reports]}


def certify(cm: ChartMetric, points: list, tol: float = 1e-5, fd_step: float = INNER_STEP,
            strict: bool = False) -> Certificate:
    """Flat, SymmetricRank1, HolonomyFullG2kind or Inconclusive from at least five samples."""
    if len(points) < 5:
        raise ValueError("certify needs at least five sample points")
    reports = []
    for p in points:
        reports.append(riemann(cm, p, fd_step=fd_step, parallel=(cm.dim == 6)))
    verdicts = {r.verdict for r in reports}
    if all(float(np.max(np.abs(r.riemann))) < tol for r in reports):
        verdict = "Flat"
    elif len(verdicts) == 1:
        verdict = verdicts.pop()
    else:
        verdict = "Inconclusive"
    if strict and verdict == "Inconclusive":
        raise Inconclusive(f"per-point verdicts {sorted(r.verdict for r in reports)}")
    return Certificate(verdict, reports)


def rigidity_component(rep: CurvatureReport, tol: float = 1e-6) -> dict:
    """Check that d_x1 ^ d_y1 -> c d_x3 ^ d_y3 is the only entry of the curvature operator."""
    P = pairs(6)
    src, dst = P.index((0, 3)), P.index((2, 5))
    op = rep.operator[:15, :15] if rep.operator.shape[0] > 15 else rep.operator
    c = float(op[dst, src])
    rest = op.copy()
    rest[dst, src] = 0.0
    return {"c": c, "others": float(np.max(np.abs(rest))), "ok": float(np.max(np.abs(rest))) < tol}


# ---------------------------------------------------------------------------
# conformal completion

def tanh_diffeo(a: float | None, b: float | None):
    """Smooth increasing map R -> (a, b) sending 0 to 0 (0 must lie inside)."""
    if a is None and b is None:
        return (lambda r: r), (lambda r: 1.0)
    if a is None or b is None:
        raise NotADiffeo("half-infinite intervals need an explicit diffeomorphism")
    if not a < 0 < b:
        raise NotADiffeo("the interval must contain 0")
    m, w = (a + b) / 2, (b - a) / 2
    r0 = math.atanh(-m / w)
    return (lambda r: m + w * math.tanh(r + r0)), (lambda r: w / math.cosh(r + r0) ** 2)


def check_diffeo(phi, dphi, interval, grid=np.linspace(-10, 10, 401)) -> None:
    a, b = interval
    vals = [phi(r) for r in grid]
    ders = [dphi(r) for r in grid]
    if any(not (d > 0) for d in ders) or any(v2 <= v1 for v1, v2 in zip(vals, vals[1:])):
        raise NotADiffeo("derivative not positive on the sample grid")
    if any((a is not None and v <= a) or (b is not None and v >= b) for v in vals):
        raise NotADiffeo("values leave the interval")


def time_interval(ks: KappaSolution) -> tuple:
    """Image of the kappa interval under t(x), ordered."""
    from .flow import integrate
    ends = [None if e is None else integrate(ks._speed_f, 0.0, float(S.to_float(e))) for e in ks.interval]
    # t is monotone in x; orientation follows the sign of dt/dx
    if ks.sign < 0:
        ends = ends[::-1]
    return tuple(ends)


def conformal_complete(ks: KappaSolution, diffeo=None) -> ChartMetric:
    """dr^2 + phi'(r)^{-2} g_{phi(r)} for the t-parametrized family g_t = g(x(t)).

    diffeo is a pair (phi, dphi) mapping R onto the time interval; the default
    is the shifted tanh with phi(0) = 0, which is sqrt2 tanh r on (-sqrt2, sqrt2).
    The coefficient of dr^2 is -eps, the sign of dt^2 in g(x) - kappa/4 dx^2.
    """
    I = time_interval(ks)
    phi, dphi = diffeo if diffeo is not None else tanh_diffeo(*I)
    check_diffeo(phi, dphi, I)
    sgn = -ks.epsilon

    def ev(p):
        r = float(p[6])
        x = ks.x_of_t(phi(r))
        out = np.zeros((7, 7))
        out[:6, :6] = _algebraic_to_chart(np.asarray(ks.g(x), dtype=float), p) / dphi(r) ** 2
        out[6, 6] = sgn
        return out

    return ChartMetric(7, ev, "conformal completion dr^2 + phi'(r)^-2 g_phi(r)")
