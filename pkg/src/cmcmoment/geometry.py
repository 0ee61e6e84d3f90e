"""Pointwise extrinsic geometry of a surface jet in M_q.

Everything is computed in the ambient V: the second fundamental form is the
ambient Hessian contracted with the unit normal, which is exact because N is
orthogonal to both x and q.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lorentz as lz
from .spaceform import SpaceForm
from .surfaces import SurfaceJet

UMBILIC_RTOL = 1e-8


class DegenerateMetric(ValueError):
    """The jet does not immerse at this point."""


@dataclass
class PointGeometry:
    I: np.ndarray       # (..., 2, 2)
    N: np.ndarray       # (..., 5)
    II: np.ndarray      # (..., 2, 2)
    H: np.ndarray       # (...)
    A0: np.ndarray      # trace-free shape operator I^-1 II - H, (..., 2, 2)
    Q: np.ndarray       # II - H I
    Qsharp: np.ndarray  # I^-1 Q (equal to A0)

    @property
    def shape_operator(self):
        return self.A0 + self.H[..., None, None] * np.eye(2)

    @property
    def area_density(self):
        return np.sqrt(np.linalg.det(self.I))

    def is_umbilic(self, rtol=UMBILIC_RTOL):
        a0 = np.linalg.norm(self.A0, axis=(-2, -1))
        a = np.linalg.norm(self.shape_operator, axis=(-2, -1))
        return a0 < rtol * np.maximum(a, 1e-300)


def unit_normal(sf: SpaceForm, x, xu, xv):
    """Unit normal in span(x, q)^perp orthogonal to xu, xv with det5(xu, xv, N, x, q) > 0."""
    n = lz.lorentz_normal(x, sf.q, xu, xv)
    # det5(xu, xv, n, x, q) = det5(n, x, q, xu, xv) = ip(n, n) > 0 for spacelike n
    nn = lz.ip(n, n)
    if np.any(nn <= 0):
        raise DegenerateMetric("normal is not spacelike; jet does not immerse")
    return n / np.sqrt(nn)[..., None]


def first_form(j: SurfaceJet):
    D = j.d1()
    return np.einsum("...ak,...bk,k->...ab", D, D, lz.SIGN)


def point_geometry(sf: SpaceForm, j: SurfaceJet) -> PointGeometry:
    I = first_form(j)
    if np.any(np.linalg.det(I) <= 0):
        raise DegenerateMetric("induced metric is degenerate")
    N = unit_normal(sf, j.x, j.xu, j.xv) if j.normal is None else j.normal
    II = np.einsum("...abk,...k,k->...ab", j.d2(), N, lz.SIGN)
    Iinv = np.linalg.inv(I)
    A = Iinv @ II
    H = 0.5 * np.trace(A, axis1=-2, axis2=-1)
    eye = np.eye(2)
    A0 = A - H[..., None, None] * eye
    Q = II - H[..., None, None] * I
    return PointGeometry(I=I, N=N, II=II, H=H, A0=A0, Q=Q, Qsharp=Iinv @ Q)


def hopf_commutes_residual(g: PointGeometry):
    """sup |Q(AU, V) - Q(U, AV)| over coordinate frame vectors."""
    A = g.shape_operator
    C = np.swapaxes(A, -1, -2) @ g.Q - g.Q @ A
    return np.max(np.abs(C), axis=(-2, -1))


def tangent_coordinates(j: SurfaceJet, g: PointGeometry, w):
    """Coordinates t with dx(t) = tangential part of w (w a vector field along x)."""
    rhs = np.einsum("...ak,...k,k->...a", j.d1(), w, lz.SIGN)
    return np.linalg.solve(g.I, rhs[..., None])[..., 0]


def normal_derivatives(j: SurfaceJet, g: PointGeometry):
    """dN from Weingarten: N_a = -x_b A^b_a, as (..., 2, 5)."""
    A = g.shape_operator
    return -np.einsum("...bk,...ba->...ak", j.d1(), A)


def normal_second_derivatives(sf: SpaceForm, j: SurfaceJet, g: PointGeometry):
    """N_ab by differentiating Weingarten; needs the 3-jet.  Shape (..., 2, 2, 5)."""
    D1, D2, D3 = j.d1(), j.d2(), j.d3()
    s = lz.SIGN
    Iinv = np.linalg.inv(g.I)
    A = g.shape_operator
    dN = normal_derivatives(j, g)
    # dI[b, a, c] = d_b I_ac ; dII[b, a, c] = d_b II_ac
    dI = (np.einsum("...abk,...ck,k->...bac", D2, D1, s)
          + np.einsum("...ak,...cbk,k->...bac", D1, D2, s))
    dII = (np.einsum("...acbk,...k,k->...bac", D3, g.N, s)
           + np.einsum("...ack,...bk,k->...bac", D2, dN, s))
    # d_b A = -I^-1 (d_b I) A + I^-1 d_b II
    dA = -np.einsum("...cd,...bde,...ea->...bca", Iinv, dI, A) + np.einsum("...cd,...bda->...bca", Iinv, dII)
    # N_ab = d_b(-x_c A^c_a) = -x_cb A^c_a - x_c d_b A^c_a
    return -np.einsum("...cbk,...ca->...abk", D2, A) - np.einsum("...ck,...bca->...abk", D1, dA)
