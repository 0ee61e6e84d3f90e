"""Catalog of analytic immersions into the conic-section space forms.

Each family is written in a chart (R^3 for K = 0, the pseudo-sphere in
q^perp for K != 0) as a sum of separable terms  coeff * f(u) * g(v), so every
partial derivative up to third order is available in closed form.  The
unduloid's profile is the solution of the Delaunay ODE; its derivatives are
read off the ODE right-hand side.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from . import lorentz as lz
from .spaceform import SpaceForm, make_spaceform

TWO_PI = 2.0 * np.pi

# ---------------------------------------------------------------------------
# one-variable factors


class Trig:
    """amp * cos(freq * t + phase)."""

    def __init__(self, amp=1.0, freq=1.0, phase=0.0):
        self.amp, self.freq, self.phase = amp, freq, phase

    def derivs(self, t, n):
        t = np.asarray(t, dtype=float)
        return np.stack([self.amp * self.freq**k * np.cos(self.freq * t + self.phase + k * np.pi / 2)
                         for k in range(n + 1)])


def cos_(freq=1.0, amp=1.0):
    return Trig(amp, freq, 0.0)


def sin_(freq=1.0, amp=1.0):
    return Trig(amp, freq, -np.pi / 2)


class Hyperbolic:
    """amp * cosh(rate * t) (odd=False) or amp * sinh(rate * t) (odd=True)."""

    def __init__(self, amp=1.0, rate=1.0, odd=False):
        self.amp, self.rate, self.odd = amp, rate, odd

    def derivs(self, t, n):
        t = np.asarray(t, dtype=float)
        ch, sh = np.cosh(self.rate * t), np.sinh(self.rate * t)
        out = []
        for k in range(n + 1):
            use_sinh = (k % 2 == 1) != self.odd
            out.append(self.amp * self.rate**k * (sh if use_sinh else ch))
        return np.stack(out)


class Poly:
    """Polynomial with coefficients c[0] + c[1] t + ..."""

    def __init__(self, *coeffs):
        self.p = np.polynomial.Polynomial(coeffs if coeffs else (0.0,))

    def derivs(self, t, n):
        t = np.asarray(t, dtype=float)
        return np.stack([self.p.deriv(k)(t) * np.ones_like(t) for k in range(n + 1)])


ONE = Poly(1.0)


class DelaunayProfile:
    """Arclength-parametrized meridian (rho(s), z(s)) of a Delaunay unduloid.

    Solves  rho' = cos(phi), z' = sin(phi), phi' = 2H - sin(phi)/rho  from a
    neck rho(0) = necksize, phi(0) = pi/2.  First integral:
    rho sin(phi) - H rho^2 = necksize - H necksize^2.
    """

    def __init__(self, H, necksize, n_periods=3, rtol=1e-13, atol=1e-13):
        H = float(H)
        a = float(necksize)
        if not (H > 0 and 0 < a < 1.0 / (2.0 * H)):
            raise ValueError(f"unduloid necksize must lie in (0, 1/(2H)) = (0, {1/(2*H):g}), got {a:g}")
        self.H, self.necksize = H, a
        self.first_integral = a - H * a * a
        self.bulge = 1.0 / H - a

        def neck(s, y):
            return np.cos(y[2])
        neck.direction = 0.0

        probe = solve_ivp(self._rhs, (0.0, 50.0 / H), [a, 0.0, np.pi / 2], method="DOP853",
                          rtol=rtol, atol=atol, events=neck)
        # events: t=0 itself may register; the period is the second crossing after 0
        ev = [t for t in probe.t_events[0] if t > 1e-9]
        if len(ev) < 2:
            raise RuntimeError("could not locate the unduloid period")
        self.period = float(ev[1])
        self.length = n_periods * self.period
        self._sol = solve_ivp(self._rhs, (0.0, self.length), [a, 0.0, np.pi / 2], method="DOP853",
                              rtol=rtol, atol=atol, dense_output=True)
        self.axial_period = float(self._sol.sol(self.period)[1])

    def _rhs(self, s, y):
        rho, _, phi = y
        return [np.cos(phi), np.sin(phi), 2.0 * self.H - np.sin(phi) / rho]

    def state(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < -1e-12) or np.any(s > self.length + 1e-12):
            raise ValueError(f"profile parameter outside [0, {self.length:g}]")
        return self._sol.sol(s.ravel()).reshape((3,) + s.shape)

    def derivs_all(self, s, n):
        """Derivatives of (rho, z) up to order n <= 3."""
        rho, z, phi = self.state(s)
        c, sn = np.cos(phi), np.sin(phi)
        p1 = 2.0 * self.H - sn / rho
        p2 = -c * p1 / rho + sn * c / rho**2
        r = [rho, c, -sn * p1, -c * p1**2 - sn * p2]
        zz = [z, sn, c * p1, -sn * p1**2 + c * p2]
        return np.stack(r[: n + 1]), np.stack(zz[: n + 1])

    def first_integral_residual(self, s):
        rho, _, phi = self.state(s)
        return rho * np.sin(phi) - self.H * rho**2 - self.first_integral


class _ProfileFactor:
    def __init__(self, profile, which):
        self.profile, self.which = profile, which

    def derivs(self, t, n):
        r, z = self.profile.derivs_all(t, n)
        return r if self.which == "rho" else z


# ---------------------------------------------------------------------------
# families


@dataclass
class SurfaceFamily:
    """A parametrized immersion x(u, v) into M_q.

    ``terms`` lists (component, coeff, f, g) with chart component
    ``component`` equal to sum coeff * f(u) * g(v).  For K = 0 components
    0..2 are R^3 coordinates; for K != 0 components index V = R^{4,1} and
    the chart lies in q^perp.
    """

    kind: str
    K: float
    params: dict
    terms: list
    domain: tuple  # ((u_lo, u_hi), (v_lo, v_hi)), closed intervals; None bound = unbounded
    u_period: Optional[float] = None
    v_period: Optional[float] = None
    H: Optional[float] = None
    cmc: bool = True
    description: str = ""
    default_cycles: list = field(default_factory=list)
    umbilic: Callable = None  # (u, v) -> bool array; None = no umbilics

    def in_domain(self, u, v):
        (ul, uh), (vl, vh) = self.domain
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        ok = np.ones(np.broadcast(u, v).shape, dtype=bool)
        if ul is not None:
            ok &= u >= ul - 1e-12
        if uh is not None:
            ok &= u <= uh + 1e-12
        if vl is not None:
            ok &= v >= vl - 1e-12
        if vh is not None:
            ok &= v <= vh + 1e-12
        return ok

    def chart_partials(self, u, v, order=2):
        """Dict (i, j) -> d^i_u d^j_v of the chart map, shape (..., 5)."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        if not np.all(self.in_domain(u, v)):
            raise ValueError(f"{self.kind}: parameter outside the domain {self.domain}")
        out = {(i, j): np.zeros(u.shape + (lz.DIM,))
               for i in range(order + 1) for j in range(order + 1 - i)}
        for comp, coeff, f, g in self.terms:
            fu = f.derivs(u, order)
            gv = g.derivs(v, order)
            for (i, j), arr in out.items():
                arr[..., comp] += coeff * fu[i] * gv[j]
        return out


def _multi_indices(order):
    return [(i, j) for i in range(order + 1) for j in range(order + 1 - i)]


def sphere(r=1.0, center=(0.0, 0.0, 0.0)) -> SurfaceFamily:
    """Round sphere in R^3; u = colatitude in (0, pi), v = longitude."""
    c = np.asarray(center, dtype=float)
    terms = [
        (0, r, sin_(), cos_()), (1, r, sin_(), sin_()), (2, r, cos_(), ONE),
        (0, c[0], ONE, ONE), (1, c[1], ONE, ONE), (2, c[2], ONE, ONE),
    ]
    return SurfaceFamily(
        kind="sphere", K=0.0, params={"r": r, "center": list(map(float, c))}, terms=terms,
        domain=((0.05, np.pi - 0.05), (None, None)), v_period=TWO_PI, H=1.0 / r,
        description="round sphere of radius r in R^3 (totally umbilic, H^1 = 0)",
        default_cycles=[("v", 0.6), ("v", 1.3), ("v", 2.2)],
        umbilic=lambda u, v: np.ones(np.broadcast(u, v).shape, dtype=bool),
    )


def cylinder(r=1.0) -> SurfaceFamily:
    """Circular cylinder of radius r about the e2 axis; u = angle, v = height."""
    terms = [(0, r, cos_(), ONE), (1, r, sin_(), ONE), (2, 1.0, ONE, Poly(0.0, 1.0))]
    return SurfaceFamily(
        kind="cylinder", K=0.0, params={"r": r}, terms=terms,
        domain=((None, None), (None, None)), u_period=TWO_PI, H=1.0 / (2.0 * r),
        description="cylinder of radius r about the e2 axis",
        default_cycles=[("u", 0.0), ("u", 0.7), ("u", -1.9)],
    )


def unduloid(H=0.5, necksize=0.5, n_periods=3) -> SurfaceFamily:
    """Delaunay unduloid about the e2 axis; u = angle, v = meridian arclength from a neck."""
    prof = DelaunayProfile(H, necksize, n_periods=n_periods)
    rho, z = _ProfileFactor(prof, "rho"), _ProfileFactor(prof, "z")
    terms = [(0, 1.0, cos_(), rho), (1, 1.0, sin_(), rho), (2, 1.0, ONE, z)]
    L = prof.length
    fam = SurfaceFamily(
        kind="unduloid", K=0.0, params={"H": H, "necksize": necksize}, terms=terms,
        domain=((None, None), (0.0, L)), u_period=TWO_PI, H=H,
        description="Delaunay unduloid with mean curvature H and neck radius necksize < 1/(2H)",
        default_cycles=[("u", 0.1 * prof.period), ("u", 0.45 * prof.period), ("u", 1.3 * prof.period)],
    )
    fam.profile = prof
    return fam


def perturbed_cylinder(r=1.0, eps=0.1) -> SurfaceFamily:
    """Non-CMC control: radius r (1 + eps cos u cos v) about the e2 axis."""
    a = 0.5 * r * eps
    terms = [
        (0, r, cos_(), ONE), (0, a, ONE, cos_()), (0, a, cos_(2.0), cos_()),
        (1, r, sin_(), ONE), (1, a, sin_(2.0), cos_()),
        (2, 1.0, ONE, Poly(0.0, 1.0)),
    ]
    return SurfaceFamily(
        kind="perturbed_cylinder", K=0.0, params={"r": r, "eps": eps}, terms=terms,
        domain=((None, None), (None, None)), u_period=TWO_PI, v_period=TWO_PI, H=None, cmc=False,
        description="negative control: cylinder with radius r(1 + eps cos u cos v); not CMC",
        default_cycles=[("u", 0.0), ("u", 0.9)],
    )


def product_torus_s3(r1=1.0 / np.sqrt(2.0), K=1.0) -> SurfaceFamily:
    """Product torus (r1 S^1) x (r2 S^1) in the 3-sphere of curvature K, r1^2 + r2^2 = 1 (unit scale)."""
    if not (K > 0 and 0 < r1 < 1):
        raise ValueError("product torus needs K > 0 and 0 < r1 < 1")
    r2 = np.sqrt(1.0 - r1 * r1)
    s = 1.0 / np.sqrt(K)
    terms = [(0, s * r1, cos_(), ONE), (1, s * r1, sin_(), ONE),
             (2, s * r2, ONE, cos_()), (3, s * r2, ONE, sin_())]
    H = 0.5 * np.sqrt(K) * (r2 / r1 - r1 / r2)
    return SurfaceFamily(
        kind="product_torus_s3", K=K, params={"r1": r1, "K": K}, terms=terms,
        domain=((None, None), (None, None)), u_period=TWO_PI, v_period=TWO_PI, H=H,
        description="CMC product torus in S^3; r1 = 1/sqrt(2) is the minimal Clifford torus",
        default_cycles=[("u", 0.0), ("u", 1.1), ("v", 0.0), ("v", 2.3)],
    )


def sphere_s3(beta=np.pi / 2, K=1.0) -> SurfaceFamily:
    """Geodesic sphere of angular radius beta in the 3-sphere; beta = pi/2 is totally geodesic."""
    s = 1.0 / np.sqrt(K)
    sb, cb = np.sin(beta), np.cos(beta)
    terms = [(0, s * sb, sin_(), cos_()), (1, s * sb, sin_(), sin_()), (2, s * sb, cos_(), ONE),
             (3, s * cb, ONE, ONE)]
    return SurfaceFamily(
        kind="sphere_s3", K=K, params={"beta": beta, "K": K}, terms=terms,
        domain=((0.05, np.pi - 0.05), (None, None)), v_period=TWO_PI, H=-np.sqrt(K) * cb / sb,
        description="geodesic sphere in S^3 (totally umbilic)",
        default_cycles=[("v", 0.7), ("v", 1.9)],
        umbilic=lambda u, v: np.ones(np.broadcast(u, v).shape, dtype=bool),
    )


def equidistant_tube_h3(rho=0.6, K=-1.0) -> SurfaceFamily:
    """Tube at distance rho about a geodesic of hyperbolic space; u = angle, v = arclength."""
    if not (K < 0 and rho > 0):
        raise ValueError("tube needs K < 0 and rho > 0")
    s = 1.0 / np.sqrt(-K)
    ch, sh = np.cosh(rho), np.sinh(rho)
    terms = [(0, s * ch, ONE, Hyperbolic(odd=True)), (1, s * sh, cos_(), ONE),
             (2, s * sh, sin_(), ONE), (4, s * ch, ONE, Hyperbolic(odd=False))]
    fam = SurfaceFamily(
        kind="equidistant_tube_h3", K=K, params={"rho": rho, "K": K}, terms=terms,
        domain=((None, None), (-3.0, 3.0)), u_period=TWO_PI,
        description="equidistant tube about a geodesic in H^3 (upper sheet)",
        default_cycles=[("u", -0.4), ("u", 0.8)],
    )
    fam.H = _numerical_H(fam)
    return fam


def _numerical_H(fam):
    from .geometry import point_geometry
    sf = make_spaceform(fam.K)
    return float(point_geometry(sf, jet(fam, sf, 0.3, 0.2)).H)


FAMILIES = {
    "sphere": sphere,
    "cylinder": cylinder,
    "unduloid": unduloid,
    "product_torus_s3": product_torus_s3,
    "equidistant_tube_h3": equidistant_tube_h3,
    "perturbed_cylinder": perturbed_cylinder,
    "sphere_s3": sphere_s3,
}


def make_family(kind, **params) -> SurfaceFamily:
    try:
        factory = FAMILIES[kind]
    except KeyError:
        raise ValueError(f"unknown surface family {kind!r}; known: {sorted(FAMILIES)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# jets


@dataclass
class SurfaceJet:
    """x and its partial derivatives in V; third-order fields are optional.

    ``normal`` optionally prescribes the unit normal (used for parallel
    surfaces, whose normal comes with the construction); otherwise the
    geometry module picks it from the orientation of (x_u, x_v).
    """

    x: np.ndarray
    xu: np.ndarray
    xv: np.ndarray
    xuu: np.ndarray
    xuv: np.ndarray
    xvv: np.ndarray
    xuuu: Optional[np.ndarray] = None
    xuuv: Optional[np.ndarray] = None
    xuvv: Optional[np.ndarray] = None
    xvvv: Optional[np.ndarray] = None
    normal: Optional[np.ndarray] = None

    def d1(self):
        """First derivatives stacked as (..., 2, 5)."""
        return np.stack([self.xu, self.xv], axis=-2)

    def d2(self):
        """Second derivatives as (..., 2, 2, 5)."""
        return np.stack([np.stack([self.xuu, self.xuv], axis=-2),
                         np.stack([self.xuv, self.xvv], axis=-2)], axis=-3)

    def d3(self):
        """Third derivatives as (..., 2, 2, 2, 5)."""
        if self.xuuu is None:
            raise ValueError("jet carries no third-order data")
        t = {0: self.xuuu, 1: self.xuuv, 2: self.xuvv, 3: self.xvvv}
        return np.stack([np.stack([np.stack([t[a + b + c] for c in (0, 1)], axis=-2)
                                   for b in (0, 1)], axis=-3) for a in (0, 1)], axis=-4)

    def map(self, g):
        """Image of the jet under a linear map g of V."""
        g = np.asarray(g, dtype=float)
        def f(a):
            return None if a is None else np.einsum("ij,...j->...i", g, a)
        return SurfaceJet(*(f(getattr(self, n)) for n in _JET_FIELDS))

    def invariant_residuals(self, sf: SpaceForm):
        """Max violation of membership and differentiated constraints."""
        r = [np.abs(lz.ip(self.x, self.x)), np.abs(lz.ip(self.x, sf.q) + 1.0)]
        for d in (self.xu, self.xv):
            r.append(np.abs(lz.ip(d, sf.q)))
            r.append(np.abs(lz.ip(d, self.x)))
        return np.max(np.stack(r), axis=0)


_JET_FIELDS = ("x", "xu", "xv", "xuu", "xuv", "xvv", "xuuu", "xuuv", "xuvv", "xvvv", "normal")
_KEYS = {(0, 0): "x", (1, 0): "xu", (0, 1): "xv", (2, 0): "xuu", (1, 1): "xuv", (0, 2): "xvv",
         (3, 0): "xuuu", (2, 1): "xuuv", (1, 2): "xuvv", (0, 3): "xvvv"}


def _lift_partials(sf: SpaceForm, P: dict):
    """Partials of the lightcone lift from partials of the chart map."""
    if abs(sf.K) > 1e-14:
        out = dict(P)
        out[(0, 0)] = P[(0, 0)] + sf.o
        return out
    order = max(i + j for i, j in P)
    # s = |x0|^2 by the Leibniz rule over multi-indices
    out = {}
    for (i, j), d in P.items():
        s = 0.0
        for a, b in itertools.product(range(i + 1), range(j + 1)):
            s = s + comb(i, a) * comb(j, b) * np.sum(P[(a, b)][..., :3] * P[(i - a, j - b)][..., :3], axis=-1)
        out[(i, j)] = d + 0.5 * s[..., None] * sf.q
    out[(0, 0)] = out[(0, 0)] + sf.o
    return out


def _check_family(fam: SurfaceFamily, sf: SpaceForm):
    if abs(fam.K - sf.K) > 1e-12:
        raise ValueError(f"family {fam.kind} lives in curvature {fam.K}, space form has {sf.K}")


def jet(fam: SurfaceFamily, sf: SpaceForm, u, v) -> SurfaceJet:
    """2-jet of x at (u, v)."""
    _check_family(fam, sf)
    P = _lift_partials(sf, fam.chart_partials(u, v, order=2))
    return SurfaceJet(**{_KEYS[k]: a for k, a in P.items()})


def third_order_data(fam: SurfaceFamily, sf: SpaceForm, u, v) -> SurfaceJet:
    """3-jet of x at (u, v) (all partials through third order)."""
    _check_family(fam, sf)
    P = _lift_partials(sf, fam.chart_partials(u, v, order=3))
    return SurfaceJet(**{_KEYS[k]: a for k, a in P.items()})


def catalog():
    """Description of every family: curvature, parameters and default cycles."""
    rows = []
    defaults = {
        "sphere": {"r": 1.0}, "cylinder": {"r": 1.0}, "unduloid": {"H": 0.5, "necksize": 0.5},
        "product_torus_s3": {"r1": float(1 / np.sqrt(2)), "K": 1.0},
        "equidistant_tube_h3": {"rho": 0.6, "K": -1.0},
        "perturbed_cylinder": {"r": 1.0, "eps": 0.1}, "sphere_s3": {"beta": float(np.pi / 2), "K": 1.0},
    }
    ranges = {
        "sphere": "r > 0", "cylinder": "r > 0", "unduloid": "H > 0, 0 < necksize < 1/(2H)",
        "product_torus_s3": "K > 0, 0 < r1 < 1", "equidistant_tube_h3": "K < 0, rho > 0",
        "perturbed_cylinder": "r > 0, eps small", "sphere_s3": "K > 0, 0 < beta < pi",
    }
    for kind, factory in FAMILIES.items():
        fam = factory(**defaults[kind])
        rows.append({"kind": kind, "K": fam.K, "defaults": defaults[kind], "ranges": ranges[kind],
                     "cmc": fam.cmc, "H": fam.H, "u_period": fam.u_period, "v_period": fam.v_period,
                     "default_cycles": [list(c) for c in fam.default_cycles],
                     "description": fam.description})
    return rows
