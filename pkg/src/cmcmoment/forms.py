"""Lie-algebra valued 1-forms on a surface, evaluated on jets.

A bivector-valued covector is an array of shape (..., 2, 10): index -2 picks
the du / dv component.  Scalar covectors paired with a stack of Killing
fields Y of shape (m, 10) come out as (..., 2, m).
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import lorentz as lz
from .geometry import PointGeometry, point_geometry, tangent_coordinates
from .spaceform import SpaceForm, conformal_field_at
from .surfaces import SurfaceJet


def _tangent_images(j: SurfaceJet, M):
    # dx(M e_a) = sum_b x_b M[b, a], stacked (..., 2, 5)
    return np.einsum("...bk,...ba->...ak", j.d1(), M)


def _pair(sf: SpaceForm, form, Y):
    """S(form)(Y) for a bivector covector and a stack of Killing fields."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        return lz.s_eval(sf.o, form, Y)
    return lz.s_eval(sf.o, form[..., None, :], Y)


def retraction_form(sf: SpaceForm, j: SurfaceJet, g: PointGeometry):
    """eta = x ^ dx o Q#."""
    W = _tangent_images(j, g.Qsharp)
    return lz.wedge(j.x[..., None, :], W)


def eta_q_component(sf: SpaceForm, j: SurfaceJet, g: PointGeometry):
    """eta(d) q for d = du, dv; equals d(N + H x) on CMC surfaces."""
    return lz.apply(retraction_form(sf, j, g), sf.q)


def eta_pairing(sf: SpaceForm, j: SurfaceJet, g: PointGeometry, Y):
    """Definitional eta_Y(U) = Q(Y^T, U), from the conformal field of Y.  Shape (..., 2[, m])."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim > 1:
        return np.stack([eta_pairing(sf, j, g, y) for y in Y], axis=-1)
    t = tangent_coordinates(j, g, conformal_field_at(sf, Y, j.x))
    return np.einsum("...b,...ba->...a", t, g.Q)


def alpha_o_form(sf: SpaceForm, j: SurfaceJet):
    """alpha^o(d) = (x - o) ^ dx(d)."""
    return lz.wedge((j.x - sf.o)[..., None, :], j.d1())


def killing_area_form(sf: SpaceForm, j: SurfaceJet, g: PointGeometry, Y):
    """i_{Y^T} vol_x on du, dv, with vol_x = sqrt(det I) du ^ dv."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        t = tangent_coordinates(j, g, conformal_field_at(sf, Y, j.x))
        rt = g.area_density
        return np.stack([-rt * t[..., 1], rt * t[..., 0]], axis=-1)
    cols = [killing_area_form(sf, j, g, y) for y in Y]
    return np.stack(cols, axis=-1)


def moment_rep_classical(sf: SpaceForm, j: SurfaceJet, g: PointGeometry, Y):
    """i_{Y^T} vol_x - 2H x*alpha_Y, with 2 alpha_Y realized as S(alpha^o)(Y)."""
    ivol = killing_area_form(sf, j, g, Y)
    salpha = _pair(sf, alpha_o_form(sf, j), Y)
    H = g.H[..., None] if np.ndim(Y) == 1 else g.H[..., None, None]
    return ivol - H * salpha


def moment_rep_via_S(sf: SpaceForm, j: SurfaceJet, g: PointGeometry, Y):
    """S(dx ^ (N + H x))(Y): the S-image of the cohomologous representative of eta."""
    w = g.N + g.H[..., None] * j.x
    return _pair(sf, lz.wedge(j.d1(), w[..., None, :]), Y)


def s_of_eta(sf: SpaceForm, j: SurfaceJet, g: PointGeometry, Y):
    """S(eta)(Y) pointwise; o-components of eta drop out of det(o ^ . ^ Y)."""
    return _pair(sf, retraction_form(sf, j, g), Y)


# ---------------------------------------------------------------------------
# classical forms in charts


def chart_cross(sf: SpaceForm, a, b):
    """Cross product of the R^3 chart oriented by vol_M = det(o, q, ., ., .).

    With the standard model o, q this orientation is opposite to the
    coordinate one on (e0, e1, e2), so this is -numpy.cross.
    """
    E = np.eye(3)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    comps = [sf.volume(sf.o, _e5(a), _e5(b), _e5(E[i])) for i in range(3)]
    return np.stack(comps, axis=-1)


def _e5(v):
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (lz.DIM,))
    out[..., :3] = v
    return out


def flux_form(sf: SpaceForm, j: SurfaceJet, g: PointGeometry):
    """dx0 x (N0 + H x0) with the coordinate cross product on (e0, e1, e2).  Shape (..., 2, 3).

    Its component along e_i has the same periods as the moment representative
    on the basis translation e_i ^ q.
    """
    x0 = j.x[..., :3]
    w = g.N[..., :3] + g.H[..., None] * x0
    return np.cross(j.d1()[..., :3], w[..., None, :])


def torque_form(sf: SpaceForm, j: SurfaceJet, g: PointGeometry):
    """-(N0 ^ dx0) x0 - H |x0|^2 dx0, with (a ^ b) c = <a, c> b - <b, c> a.  Shape (..., 2, 3)."""
    x0 = j.x[..., None, :3]
    N0 = g.N[..., None, :3]
    dx0 = j.d1()[..., :3]
    wedge_apply = (np.sum(N0 * x0, axis=-1)[..., None] * dx0
                   - np.sum(dx0 * x0, axis=-1)[..., None] * N0)
    return -wedge_apply - g.H[..., None, None] * np.sum(x0 * x0, axis=-1)[..., None] * dx0


def so3_pairing(sf: SpaceForm, u, Y):
    """<u, v ^ w> = <u, v x w> extended linearly to rotation bivectors Y in Lambda^2 R^3.

    Uses the chart cross product, so that torque periods pair with rotation
    bivectors to give moment periods.
    """
    A = lz.skew(Y)[..., :3, :3]
    # v ^ w has A = v w^T - w v^T and v x w = sum_{i<j} A_ij e_i x e_j
    E = np.eye(3)
    total = 0.0
    for i in range(3):
        for k in range(i + 1, 3):
            total = total + A[..., i, k] * np.sum(u * chart_cross(sf, E[i], E[k]), axis=-1)
    return total


def star_matrix(g: PointGeometry):
    """Matrix of the rotation J by +90 degrees for the metric I and orientation du ^ dv."""
    I = g.I
    rt = g.area_density[..., None, None]
    J = np.stack([np.stack([-I[..., 0, 1], -I[..., 1, 1]], axis=-1),
                  np.stack([I[..., 0, 0], I[..., 0, 1]], axis=-1)], axis=-2)
    return J / rt


def moment_form_pseudosphere(sf: SpaceForm, j: SurfaceJet, g: PointGeometry):
    """(K x0 - H N) ^ *dx0 for K != 0, where x0 = x - o and (*dx0)(d) = -dx0(J d).  Shape (..., 2, 10).

    Paired with Y by ``pseudosphere_pairing`` it has the periods of the
    moment class.
    """
    K = sf.K
    if abs(K) < 1e-14:
        raise ValueError("moment form is defined for K != 0")
    x0 = j.x - sf.o
    a = K * x0 - g.H[..., None] * g.N
    star_dx = -_tangent_images(j, star_matrix(g))
    return lz.wedge(a[..., None, :], star_dx)


def pseudosphere_pairing(sf: SpaceForm, form, Y):
    """(1/K) B(form, Y), B(A, C) = tr(A C)/2: the normalization under which the
    moment form's periods equal those of the S-representative."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        return lz.b_form(form, Y) / sf.K
    return lz.b_form(form[..., None, :], Y) / sf.K


def euclidean_translation(sf: SpaceForm, w):
    """Killing bivector whose conformal field on the R^3 chart is the constant w: q ^ w."""
    return lz.wedge(sf.q, _e5(w))


def euclidean_rotation(sf: SpaceForm, axis):
    """Killing bivector whose field on the R^3 chart is x -> axis x x (coordinate cross product).

    The field of e_i ^ e_k is x -> x_k e_i - x_i e_k, so e_m x x comes from
    e_{m+2} ^ e_{m+1} (indices mod 3).
    """
    a = np.asarray(axis, dtype=float)
    E = np.eye(lz.DIM)
    return sum(a[m] * lz.wedge(E[(m + 2) % 3], E[(m + 1) % 3]) for m in range(3))


def alpha_Y_euclidean(kind, Yx, x0, v, vol=None):
    """Primitive alpha_Y of i_Y vol on R^3, paired with the vector v.

    kind = "translation": (1/2) vol(Y(x0), x0, v);  kind = "rotation" (about 0):
    (1/3) vol(Y(x0), x0, v).  ``Yx`` is the field value Y(x0).  ``vol`` is a
    3-form on R^3 (defaults to the coordinate determinant).
    """
    if vol is None:
        vol = _det3
    factor = {"translation": 0.5, "rotation": 1.0 / 3.0}[kind]
    return factor * vol(Yx, x0, v)


def _det3(a, b, c):
    return np.sum(np.cross(a, b) * c, axis=-1)


# ---------------------------------------------------------------------------
# evaluators: (u, v) -> covector values, for quadrature


JetSource = Callable[[np.ndarray, np.ndarray], SurfaceJet]


def family_source(fam, sf) -> JetSource:
    from .surfaces import jet
    return lambda u, v: jet(fam, sf, u, v)


_BIV = {
    "eta": retraction_form,
    "alpha_o": lambda sf, j, g: alpha_o_form(sf, j),
    "moment_form": moment_form_pseudosphere,
}
_VEC = {
    "eta_q": eta_q_component,
    "flux": flux_form,
    "torque": torque_form,
}
_SCALAR = {
    "moment_classical": moment_rep_classical,
    "moment_S": moment_rep_via_S,
    "s_eta": s_of_eta,
    "eta_Y": eta_pairing,
    "killing_area": killing_area_form,
}


def form_evaluator(sf: SpaceForm, source: JetSource, name: str, Y=None, geometry=point_geometry):
    """Callable (u, v) -> covector array (..., 2, ...) for the named form."""
    def f(u, v):
        j = source(u, v)
        g = geometry(sf, j)
        if name in _BIV:
            return _BIV[name](sf, j, g)
        if name in _VEC:
            return _VEC[name](sf, j, g)
        if name in _SCALAR:
            if Y is None:
                raise ValueError(f"form {name!r} needs Killing fields Y")
            return _SCALAR[name](sf, j, g, Y)
        raise ValueError(f"unknown form {name!r}")
    return f


FORM_NAMES = tuple(_BIV) + tuple(_VEC) + tuple(_SCALAR)
