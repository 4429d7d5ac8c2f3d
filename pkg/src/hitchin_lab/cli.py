"""Command line front end: ``hitchin-lab <command> [flags]``, JSON reports on stdout or ``--out``.

Exit codes: 0 success, 2 when the input is rejected mathematically (the
report then carries an ``error`` record), 1 on I/O or usage problems.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import curvature as C
from . import flow as F
from . import fixtures
from . import scalars as S
from . import special_kahler as SK
from .exterior import FormError, KForm, parse_form, parse_form_json, to_literal, wedge
from .lie import LieAlgebra, classify_two_form, h3h3, omega_normal, su2su2
from .stable import analyze3, g2_structure, pair_analyze


class InputError(Exception):
    """Unreadable or malformed input (exit code 1)."""


# ---------------------------------------------------------------------------
# inputs

def algebra(name: str | None) -> LieAlgebra:
    if not name or name == "h3h3":
        return h3h3()
    if name == "su2su2":
        return su2su2()
    try:
        return LieAlgebra.from_salamon(name)
    except FormError:
        raise
    except Exception as exc:
        raise InputError(f"cannot read algebra {name!r}: {exc}") from exc


def _load_json(path: Path):
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _form_from_data(data, n: int, mode: str) -> KForm:
    if isinstance(data, str):
        return parse_form(data, n, mode)
    if isinstance(data, list):
        return parse_form_json(data, n, mode)
    raise InputError("a form is a literal string or a list of {idx, c} terms")


def read_form(text: str | None, key: str, n: int, mode: str) -> KForm | None:
    """A literal, a fixture name (ex1, ex2, ex3) or a JSON file holding a form or an object with ``key``."""
    if text is None:
        return None
    if text in ("ex1", "ex2", "ex3"):
        ex = getattr(fixtures, text)()
        f = getattr(ex, key)
        return f if mode == "exact" else f.to_float()
    p = Path(text)
    if text.endswith(".json") or p.is_file():
        data = _load_json(p)
        if isinstance(data, dict):
            if key not in data:
                raise InputError(f"{p} has no {key!r} entry")
            data = data[key]
        return _form_from_data(data, n, mode)
    return parse_form(text, n, mode)


def companion(args, key: str, n: int = 6) -> KForm | None:
    """--omega/--rho, falling back to the other flag's JSON object or fixture."""
    own = getattr(args, key, None)
    if own is not None:
        return read_form(own, key, n, args.mode)
    other = args.rho if key == "omega" else args.omega
    if other is None:
        return None
    if other in ("ex1", "ex2", "ex3"):
        return read_form(other, key, n, args.mode)
    if other.endswith(".json"):
        data = _load_json(Path(other))
        if isinstance(data, dict) and key in data:
            return _form_from_data(data[key], n, args.mode)
    return None


def require(form, flag: str):
    if form is None:
        raise InputError(f"{flag} is required")
    return form


fmt = S.format_scalar


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(args) -> dict:
    n = args.dim
    rho = require(read_form(args.rho, "rho", n, args.mode), "--rho")
    if n == 7:
        G = g2_structure(rho, args.tol)
        return {"dimension": 7, "signature": list(G.signature), "label": G.label, "volume": fmt(G.vol),
                "exact": G.exact}
    omega = companion(args, "omega")
    if omega is None:
        st = analyze3(rho, tol=args.tol)
        return {"lambda": fmt(st.lam), "epsilon": st.epsilon, "phi": fmt(st.phi), "hat": to_literal(st.hat)}
    p = pair_analyze(omega, rho, args.tol)
    return {"lambda": fmt(analyze3(rho, p.orientation, args.tol).lam), "epsilon": p.epsilon,
            "signature": list(p.signature), "label": p.label, "normalized": p.normalized,
            "volumes": {k: fmt(v) for k, v in p.volumes().items()}}


def cmd_classify(args) -> dict:
    omega = require(read_form(args.omega, "omega", 6, "exact"), "--omega")
    c = classify_two_form(omega, algebra(args.algebra))
    return {"type": c.kind, "normalForm": to_literal(c.normal), "scale": fmt(c.scale),
            "beta": None if c.beta is None else fmt(c.beta)}


def cmd_halfflat(args) -> dict:
    L = algebra(args.algebra)
    rho = require(read_form(args.rho, "rho", 6, args.mode), "--rho")
    omega = require(companion(args, "omega"), "--omega")
    p = pair_analyze(omega, rho, args.tol)
    closed = L.d(rho).is_zero(args.tol)
    co_closed = L.d(wedge(omega, omega)).is_zero(args.tol)
    return {"dRhoZero": closed, "dOmega2Zero": co_closed, "compatible": True, "normalized": p.normalized,
            "halfFlat": bool(closed and co_closed and p.normalized), "label": p.label,
            "signature": list(p.signature)}


def cmd_flow(args) -> list:
    L = algebra(args.algebra)
    rho = require(read_form(args.rho, "rho", 6, args.mode), "--rho")
    omega = require(companion(args, "omega"), "--omega")
    cfg = F.FlowConfig(kind=args.kind, lam=args.lam, h=args.h, drift_tol=args.tol)
    fl = F.SixFlow(L, omega, rho, cfg)
    states = fl.run(args.steps * args.h, record_every=args.record_every)
    x_of = None
    if rho.exact and omega == omega_normal(1) and args.kind == "parallel" and L.name == h3h3().name:
        ks = F.kappa_solution(rho0=rho)
        x_of = lambda s: ks.x_of_t(s.t)
    return F.trajectory_records(states, x_of)


def cmd_kappa(args) -> dict:
    rho = require(read_form(args.rho, "rho", 6, "exact"), "--rho")
    omega = companion(args, "omega")
    if args.algebra not in (None, "h3h3"):
        raise InputError("the kappa families live on h3h3")
    ks = F.kappa_solution(rho0=rho, omega0=omega)
    out = ks.as_dict()
    out["rho0"] = to_literal(rho)
    return out


def cmd_curvature(args) -> dict:
    rho = require(read_form(args.rho, "rho", 6, "exact"), "--rho")
    omega = require(companion(args, "omega"), "--omega")
    if omega == omega_normal(1):
        ks = F.kappa_solution(rho0=rho, omega0=omega)
        cm = C.chart_from_h3h3(ks)
        lo, hi = ks.interval
        span = (-1.0 if lo is None else S.to_float(lo) * 0.5, 1.0 if hi is None else S.to_float(hi) * 0.5)
        pts = C.sample_points(7, args.points, last=span)
    else:
        cm = C.chart_from_h3h3(pair_analyze(omega, rho))
        pts = C.sample_points(6, args.points)
    cert = C.certify(cm, pts, tol=args.tol, fd_step=args.fd_step)
    out = {"chart": cm.chart_info, "dimension": cm.dim, **cert.as_dict()}
    if cm.dim == 6 and cert.reports:
        rc = C.rigidity_component(cert.reports[0])
        out["rigidity"] = {"c": S.format_float(rc["c"]), "others": S.format_float(rc["others"]), "ok": rc["ok"]}
    return out


SIGNATURE_CASES = {
    "sl6": lambda: [SK.sl6_case()],
    "su33": SK.su33_cases,
    "su51": lambda: [SK.su51_case()],
}


def cmd_signature(args) -> dict:
    groups = list(SIGNATURE_CASES) if args.group == "all" else [args.group]
    orbits = [SK.orbit_signature(c) for g in groups for c in SIGNATURE_CASES[g]()]
    spaces = []
    for p, q in ((3, 3), (5, 1), (4, 2)):
        sp = SK.unitary_space(p, q)
        spaces.append({"hermitianSignature": [p, q], "gammaSignature": list(SK.gamma_signature(sp)),
                       "tauSquare": sp.tau_square()})
    return {"orbits": orbits, "spaces": spaces}


COMMANDS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "halfflat-check": cmd_halfflat,
    "flow": cmd_flow,
    "kappa": cmd_kappa,
    "curvature": cmd_curvature,
    "signature": cmd_signature,
}


# ---------------------------------------------------------------------------
# plumbing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hitchin-lab", description="Stable forms, Hitchin flows and holonomy checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tol=S.FLOAT_TOL):
        p.add_argument("--algebra", default=None, help="h3h3 (default), su2su2 or a Salamon string")
        p.add_argument("--omega", default=None, help="2-form literal, JSON file or fixture name")
        p.add_argument("--rho", default=None, help="3-form literal, JSON file or fixture name")
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        return p

    common(sub.add_parser("analyze", help="stability data of rho or of the pair (omega, rho)")).add_argument(
        "--dim", type=int, choices=(6, 7), default=6)
    common(sub.add_parser("classify", help="orbit type of omega on h3h3"))
    common(sub.add_parser("halfflat-check", help="half-flat conditions for (omega, rho)"))
    p = common(sub.add_parser("flow", help="RK4 Hitchin flow, JSON lines"), tol=1e-8)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--kind", choices=("parallel", "nearly"), default="parallel")
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--record-every", type=int, default=1)
    common(sub.add_parser("kappa", help="closed-form evolution for omega = e1f1 + e2f2 + e3f3"))
    p = common(sub.add_parser("curvature", help="curvature certificate of the induced metric"), tol=1e-5)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--fd-step", type=float, default=C.INNER_STEP)
    p = common(sub.add_parser("signature", help="special Kaehler signature table"))
    p.add_argument("--group", choices=("all", *SIGNATURE_CASES), default="all")
    return ap


def render(report) -> str:
    if isinstance(report, list):
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in report)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except FormError as exc:
        record = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        try:
            emit(render(record), args.out)
        except OSError:
            pass
        return 2
    except (InputError, OSError) as exc:
        sys.stderr.write(f"hitchin-lab: {exc}\n")
        return 1
    try:
        emit(render(report), args.out)
    except OSError as exc:
        sys.stderr.write(f"hitchin-lab: {exc}\n")
        return 1
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
