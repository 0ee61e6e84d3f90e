"""Cycles, periods of 1-forms, circulation around squares, the capped-disk
integral and holonomy of the pencil d + t eta.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import lorentz as lz
from .forms import JetSource, killing_area_form, retraction_form
from .geometry import point_geometry
from .spaceform import SpaceForm, conformal_field_at, lift_euclidean


class ConvergenceError(RuntimeError):
    """A quadrature or integrator accuracy gate failed."""


# ---------------------------------------------------------------------------
# cycles


@dataclass(frozen=True)
class Piece:
    """Smooth arc t in [0, 1] -> (u, v) with its derivative."""

    gamma: Callable
    dgamma: Callable
    length: float


def segment(p0, p1) -> Piece:
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    d = p1 - p0
    return Piece(lambda t: p0 + np.multiply.outer(t, d),
                 lambda t: np.broadcast_to(d, np.shape(t) + (2,)),
                 float(np.linalg.norm(d)))


@dataclass(frozen=True)
class Cycle:
    """Closed curve in the parameter domain, as a chain of smooth pieces.

    ``lattice`` is gamma(1) - gamma(0) (a period of the parametrization) for
    coordinate circles; squares close exactly.
    """

    kind: str
    pieces: tuple
    anchor: float = 0.0
    lattice: tuple = (0.0, 0.0)
    label: str = ""

    def reversed(self) -> "Cycle":
        rev = []
        for p in reversed(self.pieces):
            rev.append(Piece((lambda g: lambda t: g(1.0 - np.asarray(t)))(p.gamma),
                             (lambda dg: lambda t: -dg(1.0 - np.asarray(t)))(p.dgamma),
                             p.length))
        return Cycle(self.kind, tuple(rev), self.anchor,
                     tuple(-x for x in self.lattice), self.label + " (reversed)")

    def repeated(self, n: int) -> "Cycle":
        return Cycle(self.kind, self.pieces * n, self.anchor,
                     tuple(n * x for x in self.lattice), f"{self.label} x{n}")

    def start(self):
        return self.pieces[0].gamma(np.array(0.0))


def coordinate_u(v_anchor: float, period: float = 2 * np.pi, u0: float = 0.0) -> Cycle:
    """u runs over one period at fixed v."""
    p0 = np.array([u0, v_anchor])
    p1 = np.array([u0 + period, v_anchor])
    return Cycle("coordinate_u", (segment(p0, p1),), v_anchor, (period, 0.0), f"u-circle v={v_anchor:g}")


def coordinate_v(u_anchor: float, period: float = 2 * np.pi, v0: float = 0.0) -> Cycle:
    """v runs over one period at fixed u."""
    p0 = np.array([u_anchor, v0])
    p1 = np.array([u_anchor, v0 + period])
    return Cycle("coordinate_v", (segment(p0, p1),), u_anchor, (0.0, period), f"v-circle u={u_anchor:g}")


def square(center, side: float) -> Cycle:
    """Counterclockwise boundary of the coordinate square of the given side."""
    c = np.asarray(center, dtype=float)
    h = 0.5 * side
    corners = [c + [-h, -h], c + [h, -h], c + [h, h], c + [-h, h]]
    pieces = tuple(segment(corners[k], corners[(k + 1) % 4]) for k in range(4))
    return Cycle("parametric", pieces, 0.0, (0.0, 0.0), f"square {c.tolist()} side {side:g}")


def parametric(gamma, dgamma, length=1.0, lattice=(0.0, 0.0), label="parametric") -> Cycle:
    return Cycle("parametric", (Piece(gamma, dgamma, length),), 0.0, tuple(lattice), label)


def family_cycles(fam) -> list:
    """Default homologically nontrivial (or, for spheres, trivial) cycles of a family."""
    out = []
    for axis, anchor in fam.default_cycles:
        if axis == "u":
            out.append(coordinate_u(anchor, fam.u_period))
        else:
            out.append(coordinate_v(anchor, fam.v_period))
    return out


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule: ``order`` nodes on each of ``panels`` panels per piece."""

    order: int = 16
    panels: int = 16

    def __post_init__(self):
        if self.order < 8 or self.panels < 4:
            raise ValueError("quadrature needs order >= 8 and panels >= 4")

    def nodes(self, panels=None):
        """Nodes and weights on [0, 1]."""
        P = self.panels if panels is None else panels
        x, w = np.polynomial.legendre.leggauss(self.order)
        edges = np.linspace(0.0, 1.0, P + 1)
        a, b = edges[:-1, None], edges[1:, None]
        t = 0.5 * (a + b) + 0.5 * (b - a) * x
        ww = 0.5 * (b - a) * w
        return t.ravel(), np.broadcast_to(ww, t.shape).ravel()


DEFAULT_QUAD = QuadratureSpec()


@dataclass
class Period:
    """Result of a line integral, with the change under panel doubling."""

    value: np.ndarray
    refinement_change: float
    scale: float
    label: str = ""

    @property
    def relative_change(self):
        return self.refinement_change / max(self.scale, 1e-300)


def _integrate(form, cycle: Cycle, quad: QuadratureSpec, panels: int):
    total = 0.0
    abs_total = 0.0
    for p in cycle.pieces:
        t, w = quad.nodes(panels)
        uv = p.gamma(t)
        duv = p.dgamma(t)
        vals = np.asarray(form(uv[..., 0], uv[..., 1]))  # (n, 2, ...)
        extra = vals.ndim - 2
        d = duv.reshape(duv.shape + (1,) * extra)
        integrand = np.sum(vals * d, axis=1)
        ww = w.reshape((-1,) + (1,) * extra)
        total = total + np.sum(ww * integrand, axis=0)
        abs_total = abs_total + np.sum(ww * np.abs(integrand), axis=0)
    return total, abs_total


def line_integral(form, cycle: Cycle, quad: QuadratureSpec = DEFAULT_QUAD, rtol: float = 1e-10,
                  atol: float = 1e-13, gate: bool = True) -> Period:
    """Period of a covector-valued form along ``cycle``.

    ``form(u, v)`` returns an array (n, 2, ...) of du/dv components.  The rule
    is applied with ``quad.panels`` and twice as many panels; the finer value
    is returned and the change, relative to the integral of |integrand|, must
    stay below ``rtol`` (plus ``atol``, a floor for integrands that vanish
    up to rounding).
    """
    coarse, _ = _integrate(form, cycle, quad, quad.panels)
    fine, absval = _integrate(form, cycle, quad, 2 * quad.panels)
    change = float(np.max(np.abs(fine - coarse)))
    scale = float(max(np.max(absval), np.max(np.abs(fine)), 1e-300))
    if gate and change > rtol * scale + atol:
        raise ConvergenceError(f"period along {cycle.label} not converged: change {change:.3e} "
                               f"vs scale {scale:.3e} (rtol {rtol:g})")
    return Period(np.asarray(fine), change, scale, cycle.label)


def circulation_residual(form, center, side: float, quad: QuadratureSpec = DEFAULT_QUAD):
    """Integral of ``form`` around the counterclockwise square and its ratio to side^2.

    The ratio estimates d(form)(d_u, d_v) at the center to O(side^2).
    """
    val, _ = _integrate(form, square(center, side), quad, quad.panels)
    return val, val / side**2


# ---------------------------------------------------------------------------
# capped-disk integral


def flat_disk_cap(center, radius, axis_index=2, phase=0.0, turns=1):
    """Flat disk in the plane x[axis] = center[axis], boundary counterclockwise about +axis.

    Returns cap(s, theta) -> (point, d/ds, d/dtheta) with s in [0, 1] the radial
    fraction and theta in [0, 1] the turning fraction; the boundary s = 1
    starts at angle ``phase`` from the +e_{axis+1} direction and winds
    ``turns`` times (negative for clockwise).
    """
    c = np.asarray(center, dtype=float)
    i1, i2 = (axis_index + 1) % 3, (axis_index + 2) % 3

    def cap(s, th):
        s = np.asarray(s, dtype=float)
        th = np.asarray(th, dtype=float)
        w = 2 * np.pi * turns
        ang = phase + w * th
        P = np.zeros(np.broadcast(s, th).shape + (3,))
        Ds = np.zeros_like(P)
        Dt = np.zeros_like(P)
        P[...] = c
        P[..., i1] += radius * s * np.cos(ang)
        P[..., i2] += radius * s * np.sin(ang)
        Ds[..., i1] = radius * np.cos(ang)
        Ds[..., i2] = radius * np.sin(ang)
        Dt[..., i1] = -w * radius * s * np.sin(ang)
        Dt[..., i2] = w * radius * s * np.cos(ang)
        return P, Ds, Dt
    return cap


def cap_flux(sf: SpaceForm, cap, Y, quad: QuadratureSpec = DEFAULT_QUAD):
    """Integral over the cap of i_Y vol_M, oriented so that its boundary is theta increasing."""
    t, w = quad.nodes()
    S, T = np.meshgrid(t, t, indexing="ij")
    W = np.outer(w, w)
    P, Ds, Dt = cap(S, T)
    p = lift_euclidean(sf, P)
    Yp = conformal_field_at(sf, Y, p)
    dens = sf.volume(p, Yp, _lift_tangent(sf, P, Ds), _lift_tangent(sf, P, Dt))
    return float(np.sum(W * dens))


def _lift_tangent(sf, x0, a):
    # differential of the lift: a -> a + <x0, a> q
    out = np.zeros(a.shape[:-1] + (lz.DIM,))
    out[..., :3] = a
    return out + np.sum(x0 * a, axis=-1)[..., None] * sf.q


def kks_integral(sf: SpaceForm, source: JetSource, cycle: Cycle, Y, H: float, cap,
                 quad: QuadratureSpec = DEFAULT_QUAD, cap_tol: float = 1e-10) -> float:
    """Conormal flux of Y through the cycle minus 2H times the flux of Y through a spanning cap.

    ``cap(s, theta)`` must satisfy cap(1, t) = x0(gamma(t)) for the (single
    piece) cycle.
    """
    if abs(sf.K) > 1e-14:
        raise ValueError("capped-disk integral is implemented for K = 0")
    if len(cycle.pieces) != 1:
        raise ValueError("cap test needs a single-piece cycle")
    t, _ = quad.nodes()
    uv = cycle.pieces[0].gamma(t)
    x0 = source(uv[..., 0], uv[..., 1]).x[..., :3]
    edge, _, _ = cap(np.ones_like(t), t)
    mismatch = float(np.max(np.abs(edge - x0)))
    if mismatch > cap_tol:
        raise ValueError(f"cap boundary does not match the cycle (max deviation {mismatch:.2e})")

    def conormal(u, v):
        j = source(u, v)
        return killing_area_form(sf, j, point_geometry(sf, j), Y)
    boundary = float(line_integral(conormal, cycle, quad).value)
    return boundary - 2.0 * H * cap_flux(sf, cap, Y, quad)


# ---------------------------------------------------------------------------
# holonomy


def _connection_matrices(sf, source, piece: Piece, n: int):
    # eta(gamma') as endomorphisms at the 2n + 1 RK4 stage points
    tau = np.linspace(0.0, 1.0, 2 * n + 1)
    uv = piece.gamma(tau)
    duv = piece.dgamma(tau)
    j = source(uv[..., 0], uv[..., 1])
    eta = retraction_form(sf, j, point_geometry(sf, j))
    return lz.as_matrix(np.einsum("na,nak->nk", duv, eta))


def holonomy(sf: SpaceForm, source: JetSource, t, loop: Cycle, h: float = 1e-3,
             drift_tol: float = 1e-6):
    """Parallel transport of d + t eta around ``loop`` (classical RK4, step ~h in domain length).

    Solves M' = -t eta(gamma') M, M(0) = Id.  ``t`` may be a scalar or a
    sequence; the connection is evaluated once and reused for every t.
    Raises if M drifts off SO(4,1) by more than ``drift_tol``.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    mats = [np.eye(lz.DIM) for _ in ts]
    for piece in loop.pieces:
        n = max(1, int(np.ceil(piece.length / h)))
        A = _connection_matrices(sf, source, piece, n)
        dt = 1.0 / n
        for k, tk in enumerate(ts):
            M = mats[k]
            F = -tk * A
            for i in range(n):
                a0, am, a1 = F[2 * i], F[2 * i + 1], F[2 * i + 2]
                k1 = a0 @ M
                k2 = am @ (M + 0.5 * dt * k1)
                k3 = am @ (M + 0.5 * dt * k2)
                k4 = a1 @ (M + dt * k3)
                M = M + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            mats[k] = M
    for M in mats:
        drift = group_drift(M)
        if drift > drift_tol:
            raise ConvergenceError(f"holonomy left SO(4,1) by {drift:.2e}; refine the step")
    return mats[0] if np.ndim(t) == 0 else np.array(mats)


def group_drift(M):
    """max |M^T G M - G|."""
    return float(np.max(np.abs(M.T @ lz.G @ M - lz.G)))
