"""Verification suites run by the command line tool.

Each suite takes a prepared ``Context`` and returns a list of checks
(name, residual, tolerance, pass/fail) or raises ``NotApplicable``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import lorentz as lz
from .calculus import (DEFAULT_QUAD, QuadratureSpec, circulation_residual, flat_disk_cap,
                       holonomy, kks_integral, line_integral, square)
from .forms import (alpha_Y_euclidean, euclidean_rotation, family_source, form_evaluator,
                    pseudosphere_pairing, so3_pairing)
from .parallel import Check, double_parallel_jet, m_roots, minus_reflection, sheet_sign, verify_parallel
from .spaceform import SpaceForm, conformal_field_at, killing_basis
from .surfaces import third_order_data

SUITES = ("closedness", "homology", "representatives", "parallel", "pencil", "kks", "euclidean_alpha",
          "equivariance")

DEFAULT_TOLERANCES = {
    "closedness": 1e-6,
    "control_factor": 100.0,
    "homology": 1e-7,
    "representatives": 1e-7,
    "representatives_q": 1e-9,
    "pencil": 1e-6,
    "pencil_control": 1e-3,
    "kks": 1e-8,
    "euclidean_alpha": 1e-3,
    "equivariance": 1e-8,
    "double_parallel": 1e-6,
    "reflection": 1e-9,
}

PROPERTIES = {
    "closedness": "the retraction form is closed on CMC surfaces",
    "homology": "moment periods depend only on the homology class of the cycle",
    "representatives": "the S-image of the retraction form and the classical moment form have equal periods; "
                "the q-component of the retraction form is exact",
    "parallel": "the parallel surface is CMC with the same Hopf differential and moment class",
    "pencil": "d + t eta is flat for every t on CMC surfaces",
    "kks": "conormal flux minus 2H times the capped flux equals the moment period",
    "euclidean_alpha": "d alpha_Y = i_Y vol for translations and rotations of R^3",
    "equivariance": "moment periods transform by the adjoint action",
}


class NotApplicable(Exception):
    """The suite does not apply to this family / space form."""


@dataclass
class Context:
    sf: SpaceForm
    fam: object
    cycles: list
    quad: QuadratureSpec = DEFAULT_QUAD
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    tol_scale: float = 1.0
    seed: int = 0
    periods: dict = field(default_factory=dict)

    def tol(self, key):
        return self.tolerances[key] * self.tol_scale

    @property
    def source(self):
        return family_source(self.fam, self.sf)

    @property
    def Y(self):
        return killing_basis(self.sf)

    def rng(self, salt: int):
        return np.random.default_rng([self.seed, salt])


def rel_diff(a, b):
    """max |a - b| / max(|a|_inf, |b|_inf, 1): relative for large periods, absolute for small."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)), 1.0))


def moment_periods(ctx: Context, cycle, name="moment_S", source=None):
    src = ctx.source if source is None else source
    return line_integral(form_evaluator(ctx.sf, src, name, ctx.Y), cycle, ctx.quad).value


def classical_periods(ctx: Context, cycle):
    """The six Killing-basis periods from the chart formulas: force and torque for K = 0,
    the pseudosphere moment form otherwise."""
    sf, Y = ctx.sf, ctx.Y
    if abs(sf.K) < 1e-14:
        flux = line_integral(form_evaluator(sf, ctx.source, "flux"), cycle, ctx.quad).value
        torque = line_integral(form_evaluator(sf, ctx.source, "torque"), cycle, ctx.quad).value
        out = np.empty(6)
        out[[2, 4, 5]] = flux
        for i in (0, 1, 3):
            out[i] = so3_pairing(sf, torque, Y[i])
        return out
    mf = line_integral(form_evaluator(sf, ctx.source, "moment_form"), cycle, ctx.quad).value
    return pseudosphere_pairing(sf, mf, Y)


def _sample_points(cycle, ts=(0.1, 0.4, 0.7)):
    pts = []
    for t in ts:
        # position along the whole chain of pieces
        k = min(int(t * len(cycle.pieces)), len(cycle.pieces) - 1)
        local = t * len(cycle.pieces) - k
        pts.append(cycle.pieces[k].gamma(np.array(local)))
    return pts


# ---------------------------------------------------------------------------


def suite_closedness(ctx: Context, side=1e-2):
    worst = 0.0
    eta = form_evaluator(ctx.sf, ctx.source, "eta")
    for cyc in ctx.cycles:
        for c in _sample_points(cyc):
            _, ratio = circulation_residual(eta, c, side, ctx.quad)
            worst = max(worst, float(np.max(np.abs(ratio))))
    tol = ctx.tol("closedness")
    if ctx.fam.cmc:
        return [Check("eta_circulation_ratio", worst, tol, detail=f"square side {side:g}")]
    # negative control: the residual must exceed the CMC tolerance by the control factor
    need = tol * ctx.tolerances["control_factor"]
    return [Check("eta_circulation_ratio", worst, tol,
                  detail=f"negative control; must exceed {need:g} to be detected"),
            Check("control_detected", need / max(worst, 1e-300), 1.0, informational=True,
                  detail="ratio of detection threshold to measured residual")]


def suite_homology(ctx: Context):
    periods = {}
    for cyc in ctx.cycles:
        periods[cyc.label] = moment_periods(ctx, cyc)
    groups = {}
    for cyc in ctx.cycles:
        groups.setdefault(tuple(np.round(cyc.lattice, 12)), []).append(cyc.label)
    worst, compared = 0.0, 0
    for labels in groups.values():
        for a in labels[1:]:
            worst = max(worst, rel_diff(periods[a], periods[labels[0]]))
            compared += 1
    if compared == 0:
        raise NotApplicable("no pair of homologous cycles configured")
    return [Check("homologous_cycles", worst, ctx.tol("homology"), detail=f"{compared} pairs")]


def suite_representatives(ctx: Context):
    worst, worst_q, worst_cl = 0.0, 0.0, 0.0
    for cyc in ctx.cycles:
        pS = moment_periods(ctx, cyc, "moment_S")
        pc = moment_periods(ctx, cyc, "moment_classical")
        pq = line_integral(form_evaluator(ctx.sf, ctx.source, "eta_q"), cyc, ctx.quad).value
        pk = classical_periods(ctx, cyc)
        ctx.periods.setdefault(cyc.label, {}).update(
            {"moment_S": pS, "moment_classical": pc, "chart_formula": pk})
        worst = max(worst, rel_diff(pS, pc))
        worst_q = max(worst_q, float(np.max(np.abs(pq))))
        worst_cl = max(worst_cl, rel_diff(pS, pk))
    return [Check("S_vs_classical", worst, ctx.tol("representatives")),
            Check("eta_q_periods", worst_q, ctx.tol("representatives_q")),
            Check("S_vs_chart_formula", worst_cl, ctx.tol("representatives"),
                  detail="force/torque for K = 0, pseudosphere moment form otherwise")]


def sample_grid(fam, n=4):
    """n x n grid inside the family's domain, away from its boundary."""
    axes = []
    for lo, hi in fam.domain:
        a = 0.2 if lo is None else lo + 0.1
        b = 2.4 if hi is None else min(hi - 0.1, 2.4)
        axes.append(np.linspace(a, b, n))
    return np.meshgrid(*axes, indexing="ij")


def suite_parallel(ctx: Context):
    fam, sf = ctx.fam, ctx.sf
    if not fam.cmc:
        raise NotApplicable("parallel surfaces need a CMC surface")
    U, V = sample_grid(fam)
    if fam.umbilic is not None and np.any(fam.umbilic(U, V)):
        raise NotApplicable("surface is umbilic; the parallel surface degenerates")
    roots = m_roots(fam.H, sf.K)
    if not roots.roots:
        raise NotApplicable(f"no admissible root m ({roots.rejected})")
    checks = []
    for m in roots.roots:
        rep = verify_parallel(sf, fam, m, U, V, ctx.cycles, ctx.quad, tol_scale=ctx.tol_scale)
        for c in rep.checks:
            c.name = f"m={m:.6g}:{c.name}"
            checks.append(c)
    # double parallel: same root and conjugate root
    j3 = third_order_data(fam, sf, U, V)
    Y = ctx.Y
    for m1 in roots.roots:
        for m2 in roots.roots:
            jj = double_parallel_jet(sf, j3, m1, m2, fam.H)
            ident = float(np.max(np.abs(jj.x - j3.x)))
            refl = (float(np.max(np.abs(jj.x - minus_reflection(sf, j3.x))))
                    if abs(sf.K) > 1e-14 else np.inf)
            relation = "x" if ident <= 1e-9 else "minus reflection of x" if refl <= 1e-9 else "neither"
            checks.append(Check(f"double m={m1:.6g},{m2:.6g}:pointwise", min(ident, refl), 1e-9,
                                informational=True, detail=f"double parallel equals {relation}"))
            worst = 0.0
            for cyc in ctx.cycles:
                src = lambda u, v, a=m1, b=m2: double_parallel_jet(sf, third_order_data(fam, sf, u, v), a, b, fam.H)
                worst = max(worst, rel_diff(moment_periods(ctx, cyc, source=src), moment_periods(ctx, cyc)))
            checks.append(Check(f"double m={m1:.6g},{m2:.6g}:periods", worst, ctx.tol("double_parallel")))
    if abs(sf.K) > 1e-14 and len(roots.roots) == 2:
        from .parallel import parallel_jet
        xp = parallel_jet(sf, j3, roots.roots[0], H=fam.H).x
        xm = parallel_jet(sf, j3, roots.roots[1], H=fam.H).x
        checks.append(Check("roots_related_by_minus_reflection",
                            float(np.max(np.abs(xm - minus_reflection(sf, xp)))), ctx.tol("reflection")))
    if sf.K < 0:
        from .parallel import parallel_jet
        xh = parallel_jet(sf, j3, roots.roots[0], H=fam.H).x
        same = np.all(sheet_sign(sf, xh) == sheet_sign(sf, j3.x))
        checks.append(Check("max_root_same_sheet", 0.0 if same else 1.0, 0.5))
    return checks


def _pencil_loops(ctx: Context, side=0.3):
    loops = []
    for cyc in ctx.cycles:
        c = cyc.pieces[0].gamma(np.array(0.3))
        loops.append(square(c, side))
    return loops


def suite_pencil(ctx: Context, ts=(0.5, 1.0, 2.0), h=1e-3):
    worst = 0.0
    for loop in _pencil_loops(ctx):
        Ms = holonomy(ctx.sf, ctx.source, list(ts), loop, h=h)
        for M in Ms:
            worst = max(worst, float(np.linalg.norm(M - np.eye(lz.DIM))))
    if ctx.fam.cmc:
        return [Check("holonomy_identity", worst, ctx.tol("pencil"), detail=f"t in {list(ts)}")]
    need = ctx.tol("pencil_control")
    return [Check("holonomy_identity", worst, ctx.tol("pencil"), detail="negative control"),
            Check("control_detected", need / max(worst, 1e-300), 1.0, informational=True)]


AXIAL_FAMILIES = ("cylinder", "unduloid", "sphere")


def axial_cap(ctx: Context, cycle):
    """Flat cap spanning a coordinate circle about the e2 axis."""
    if ctx.fam.kind not in AXIAL_FAMILIES or cycle.kind not in ("coordinate_u", "coordinate_v"):
        raise NotApplicable("capped-disk integral needs a circle about the e2 axis")
    p = ctx.source(*cycle.start()).x[:3]
    turns = round(sum(cycle.lattice) / (2 * np.pi))
    return flat_disk_cap((0.0, 0.0, p[2]), float(np.hypot(p[0], p[1])), 2,
                         phase=float(np.arctan2(p[1], p[0])), turns=turns)


def suite_kks(ctx: Context):
    if abs(ctx.sf.K) > 1e-14:
        raise NotApplicable("capped-disk integral is implemented for K = 0")
    worst = 0.0
    for cyc in ctx.cycles:
        cap = axial_cap(ctx, cyc)
        kks = np.array([kks_integral(ctx.sf, ctx.source, cyc, y, ctx.fam.H, cap, ctx.quad) for y in ctx.Y])
        mu = moment_periods(ctx, cyc)
        chart = classical_periods(ctx, cyc)
        ctx.periods.setdefault(cyc.label, {})["kks"] = kks
        worst = max(worst, float(np.max(np.abs(kks - mu))), float(np.max(np.abs(kks - chart))),
                    float(np.max(np.abs(mu - chart))))
    return [Check("three_paths_agree", worst, ctx.tol("kks"))]


def _alpha_residual(kind, Y, sf, rng, side):
    E = np.eye(3)
    c = rng.uniform(-1.0, 1.0, 3)
    a, b = np.linalg.qr(rng.normal(size=(3, 2)))[0].T
    field = (lambda x: Y) if kind == "translation" else (lambda x: np.cross(Y, x))

    def form(s, t):
        x = c + np.multiply.outer(s, a) + np.multiply.outer(t, b)
        Yx = field(x)
        return np.stack([alpha_Y_euclidean(kind, Yx, x, a), alpha_Y_euclidean(kind, Yx, x, b)], axis=-1)
    _, ratio = circulation_residual(form, (0.0, 0.0), side)
    expected = float(np.dot(np.cross(field(c), a), b))
    return abs(float(ratio) - expected)


def suite_euclidean_alpha(ctx: Context, n=20, side=1e-2):
    if abs(ctx.sf.K) > 1e-14:
        raise NotApplicable("alpha_Y formulas are for Euclidean space")
    rng = ctx.rng(8)
    worst = {"translation": 0.0, "rotation": 0.0}
    for kind in worst:
        for _ in range(n):
            worst[kind] = max(worst[kind], _alpha_residual(kind, rng.normal(size=3), ctx.sf, rng, side))
    tol = ctx.tol("euclidean_alpha")
    return [Check(f"{k}_circulation_ratio", v, tol, detail=f"{n} random fields, side {side:g}")
            for k, v in worst.items()]


def random_stabilizer(sf: SpaceForm, rng, scale=0.5):
    """exp of a random element of Lambda^2 q^perp: an element of SO(4,1) fixing q."""
    c = rng.normal(size=6) * scale
    return expm(np.einsum("i,ijk->jk", c, lz.as_matrix(killing_basis(sf))))


def suite_equivariance(ctx: Context, n=3):
    rng = ctx.rng(9)
    Y = ctx.Y
    worst = 0.0
    for _ in range(n):
        g = random_stabilizer(ctx.sf, rng)
        src = lambda u, v, g=g: ctx.source(u, v).map(g)
        Yg = lz.adjoint(np.linalg.inv(g), Y)
        for cyc in ctx.cycles:
            lhs = moment_periods(ctx, cyc, source=src)
            rhs = line_integral(form_evaluator(ctx.sf, ctx.source, "moment_S", Yg), cyc, ctx.quad).value
            worst = max(worst, rel_diff(lhs, rhs))
    return [Check("adjoint_action", worst, ctx.tol("equivariance"), detail=f"{n} sampled group elements")]


RUNNERS = {
    "closedness": suite_closedness,
    "homology": suite_homology,
    "representatives": suite_representatives,
    "parallel": suite_parallel,
    "pencil": suite_pencil,
    "kks": suite_kks,
    "euclidean_alpha": suite_euclidean_alpha,
    "equivariance": suite_equivariance,
}
