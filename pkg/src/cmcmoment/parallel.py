"""Parallel CMC surfaces x^ = (N + H x + q/m) / (m - H) with m^2 - 2 H m - K = 0."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lorentz as lz
from .calculus import DEFAULT_QUAD, circulation_residual, line_integral
from .forms import form_evaluator, retraction_form
from .geometry import normal_derivatives, normal_second_derivatives, point_geometry
from .spaceform import SpaceForm, killing_basis, orthogonal_basis
from .surfaces import SurfaceJet, third_order_data

ROOT_TOL = 1e-12


@dataclass
class Roots:
    """Admissible roots in order of preference, plus the rejected ones with reasons."""

    roots: tuple
    rejected: tuple = ()


def m_roots(H: float, K: float) -> Roots:
    """Roots m = H +- sqrt(H^2 + K), dropping m = 0 and m = H.

    For K < 0 the root of largest |m| comes first (it keeps x^ on the sheet
    of x); otherwise the larger root comes first.
    """
    disc = H * H + K
    if disc < -ROOT_TOL:
        raise ValueError(f"H^2 + K = {disc:g} < 0: no parallel CMC surface")
    r = np.sqrt(max(disc, 0.0))
    cands = sorted({H + r, H - r}, reverse=True)
    if K < 0:
        cands.sort(key=lambda m: -abs(m))
    keep, rejected = [], []
    for m in cands:
        if abs(m) <= ROOT_TOL:
            rejected.append((m, "m = 0"))
        elif abs(m - H) <= ROOT_TOL:
            rejected.append((m, "m = H (double root, H^2 + K = 0)"))
        else:
            keep.append(float(m))
    return Roots(tuple(keep), tuple(rejected))


@dataclass
class ParallelData:
    m: float
    H: float
    K: float

    @property
    def mH(self):
        return self.m - self.H

    def quadratic_residual(self):
        return abs(self.m**2 - 2 * self.H * self.m - self.K)


def _normal_jet(sf: SpaceForm, j3: SurfaceJet):
    g = point_geometry(sf, j3)
    dN = normal_derivatives(j3, g)
    ddN = normal_second_derivatives(sf, j3, g)
    return g, (g.N, dN[..., 0, :], dN[..., 1, :], ddN[..., 0, 0, :], ddN[..., 0, 1, :], ddN[..., 1, 1, :])


def _offset(sf, xs, Ns, H, m):
    """Jets of x^ and N^ from jets (value, u, v, uu, uv, vv) of x and N."""
    K = sf.K
    c = 1.0 / (m - H)
    xh = [c * (N + H * x) for x, N in zip(xs, Ns)]
    xh[0] = xh[0] + c * sf.q / m
    Nh = [c * (K * x - H * N) for x, N in zip(xs, Ns)]
    Nh[0] = Nh[0] - c * sf.q
    return xh, Nh


def _as_jet(xs, normal):
    return SurfaceJet(*xs, normal=normal)


def parallel_jet(sf: SpaceForm, j3: SurfaceJet, m: float, H=None, check_umbilic=True) -> SurfaceJet:
    """2-jet of x^, carrying N^ = (K x - H N - q)/(m - H) as its normal.

    ``j3`` must carry third derivatives (x^_ab involves N_ab).  ``H`` defaults
    to the pointwise mean curvature.
    """
    g, Ns = _normal_jet(sf, j3)
    Hc = g.H if H is None else H
    Hb = np.asarray(Hc)[..., None] if np.ndim(Hc) else Hc
    if check_umbilic and np.any(g.is_umbilic()):
        raise ValueError("parallel surface does not immerse at umbilic points")
    xs = (j3.x, j3.xu, j3.xv, j3.xuu, j3.xuv, j3.xvv)
    xh, Nh = _offset(sf, xs, Ns, Hb, m)
    return _as_jet(xh, Nh[0])


def double_parallel_jet(sf: SpaceForm, j3: SurfaceJet, m1: float, m2: float, H: float) -> SurfaceJet:
    """Parallel of the parallel: first with m1, then with m2 (both roots for the same H, K)."""
    _, Ns = _normal_jet(sf, j3)
    xs = (j3.x, j3.xu, j3.xv, j3.xuu, j3.xuv, j3.xvv)
    xh, Nh = _offset(sf, xs, Ns, H, m1)
    xhh, Nhh = _offset(sf, xh, Nh, H, m2)
    return _as_jet(xhh, Nhh[0])


def parallel_source(fam, sf: SpaceForm, m: float, H=None):
    Hc = fam.H if H is None else H
    return lambda u, v: parallel_jet(sf, third_order_data(fam, sf, u, v), m, H=Hc)


def minus_reflection(sf: SpaceForm, v):
    """-v - 2 <v, q> q / K: minus the reflection in the hyperplane orthogonal to q."""
    v = np.asarray(v, dtype=float)
    return -v - 2.0 * lz.ip(v, sf.q)[..., None] * sf.q / sf.K


def sheet_sign(sf: SpaceForm, x):
    """For K < 0: which sheet of the hyperboloid x - o lies on (+1 or -1)."""
    if sf.K >= 0:
        raise ValueError("sheets are only defined for K < 0")
    a = orthogonal_basis(sf)
    t = a[np.argmin([lz.ip(b, b) for b in a])]
    x0 = np.asarray(x, dtype=float) - sf.o
    return np.sign(-lz.ip(x0, t))


# ---------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    informational: bool = False
    detail: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self):
        return {"name": self.name, "residual": float(self.residual), "tolerance": self.tolerance,
                "passed": self.passed, "informational": self.informational, "detail": self.detail}


@dataclass
class ParallelReport:
    m: float
    checks: list = field(default_factory=list)
    periods_x: dict = field(default_factory=dict)
    periods_xhat: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks if not c.informational)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed and not c.informational]


def _ratio_residual(A, B):
    # max entrywise |A / B - 1| measured against the size of B (off-diagonal entries may vanish)
    scale = np.max(np.abs(B), axis=(-2, -1), keepdims=True)
    return float(np.max(np.abs(A - B) / scale))


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def verify_parallel(sf: SpaceForm, fam, m: float, u, v, cycles=(), quad=DEFAULT_QUAD,
                    square_side=1e-2, tol_scale=1.0) -> ParallelReport:
    """Check the parallel surface of ``fam`` for root ``m`` on the sample grid (u, v) and cycles."""
    H = float(fam.H)
    K = sf.K
    rep = ParallelReport(m=m)
    add = rep.checks.append
    pd = ParallelData(m, H, K)
    add(Check("root_residual", pd.quadratic_residual(), 1e-12 * tol_scale))

    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    j3 = third_order_data(fam, sf, u, v)
    g = point_geometry(sf, j3)
    jh = parallel_jet(sf, j3, m, H=H)
    gh = point_geometry(sf, jh)
    mH = m - H

    add(Check("membership", float(np.max(sf.membership_residual(jh.x))), 1e-10 * tol_scale))
    # first derivative against -dx o A0 / (m - H)
    dxh = -np.einsum("...bk,...ba->...ak", j3.d1(), g.A0) / mH
    add(Check("first_derivative", float(np.max(np.abs(jh.d1() - dxh))), 1e-9 * tol_scale))
    Nh = jh.normal
    frame = np.max(np.abs(np.stack([
        lz.ip(Nh, Nh) - 1.0, lz.ip(Nh, sf.q), lz.ip(Nh, jh.x),
        lz.ip(Nh, jh.xu), lz.ip(Nh, jh.xv)])))
    add(Check("normal_frame", float(frame), 1e-9 * tol_scale))

    # (a) conformality, with the factor 1/(m - H)^2 = 1/(H^2 + K)
    detA0 = np.linalg.det(g.A0)[..., None, None]
    factor = -detA0 / mH**2
    add(Check("conformal", _ratio_residual(gh.I, factor * g.I), 1e-8 * tol_scale,
              detail="I^ = -det(A0) I / (H^2 + K)"))
    add(Check("conformal_unscaled", _ratio_residual(gh.I, -detA0 * g.I), 1e-8 * tol_scale,
              informational=True, detail="I^ = -det(A0) I; holds only when H^2 + K = 1"))
    # (b) mean curvature
    add(Check("mean_curvature", float(np.max(np.abs(gh.H - H))), 1e-7 * tol_scale))
    # (c) trace-free shape operator
    A0h = (H * H + K) * np.linalg.inv(g.A0)
    add(Check("tracefree_shape", float(np.max(np.abs(gh.A0 - A0h))), 1e-7 * tol_scale))
    # (d) Hopf differential
    add(Check("hopf", float(np.max(np.abs(gh.Q - g.Q))), 1e-7 * tol_scale))

    # offset identity, pointwise: eta_x - eta_x^ - (m - H)(dx^ ^ x + x^ ^ dx) = 0
    def offset_form(jx, gx, jxh, gxh):
        dxh_ = jxh.d1()
        dx_ = jx.d1()
        exact = lz.wedge(dxh_, jx.x[..., None, :]) + lz.wedge(jxh.x[..., None, :], dx_)
        return retraction_form(sf, jx, gx) - retraction_form(sf, jxh, gxh) - mH * exact
    add(Check("offset_identity_pointwise", float(np.max(np.abs(offset_form(j3, g, jh, gh)))),
              1e-9 * tol_scale))

    if cycles:
        Y = killing_basis(sf)
        src = lambda uu, vv: third_order_data(fam, sf, uu, vv)
        psrc = parallel_source(fam, sf, m, H)
        worst = 0.0
        for cyc in cycles:
            px = line_integral(form_evaluator(sf, src, "moment_S", Y), cyc, quad).value
            ph = line_integral(form_evaluator(sf, psrc, "moment_S", Y), cyc, quad).value
            rep.periods_x[cyc.label] = px.tolist()
            rep.periods_xhat[cyc.label] = ph.tolist()
            worst = max(worst, float(np.max(_rel(ph, px))))
        add(Check("moment_periods", worst, 1e-7 * tol_scale))

        def offset_eval(uu, vv):
            jx = third_order_data(fam, sf, uu, vv)
            gx = point_geometry(sf, jx)
            jxh = parallel_jet(sf, jx, m, H=H)
            return offset_form(jx, gx, jxh, point_geometry(sf, jxh))
        worst = 0.0
        for cyc in cycles:
            centre = cyc.pieces[0].gamma(np.array(0.3))
            _, ratio = circulation_residual(offset_eval, centre, square_side, quad)
            worst = max(worst, float(np.max(np.abs(ratio))))
        add(Check("offset_identity_circulation", worst, 1e-6 * tol_scale))
    return rep
