"""Space forms as conic sections M_q = {p : <p,p> = 0, <p,q> = -1} of the lightcone."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lorentz as lz

MEMBERSHIP_TOL = 1e-10


@dataclass(frozen=True)
class SpaceForm:
    """Conic section determined by q, with a chart origin o in E_q.

    Curvature is K = -<q, q>.  For K != 0 the origin is q / K; for K = 0 it
    lies on M_q itself.
    """

    q: np.ndarray
    o: np.ndarray

    @property
    def K(self) -> float:
        return float(-lz.ip(self.q, self.q))

    def validate(self, tol=1e-12):
        if np.allclose(self.q, 0.0):
            raise ValueError("q must be nonzero")
        if abs(lz.ip(self.o, self.q) + 1.0) > tol:
            raise ValueError("origin o is not on the hyperplane <o, q> = -1")
        if abs(self.K) <= tol and abs(lz.ip(self.o, self.o)) > tol:
            raise ValueError("flat space form needs a null origin")

    def volume(self, p, a, b, c):
        """Volume form of M_q at p: det(p, q, a, b, c)."""
        return lz.det5(p, self.q, a, b, c)

    def project(self, v):
        """Projection onto q^perp along o: v + <v, q> o."""
        v = np.asarray(v, dtype=float)
        return v + lz.ip(v, self.q)[..., None] * self.o

    def project_bivector(self, Y):
        """Lambda^2 q^perp component of Y in the splitting V = q^perp + R o."""
        P = np.eye(lz.DIM) + np.outer(self.o, self.q * lz.SIGN)
        return lz.adjoint(P, Y)

    def membership_residual(self, p):
        p = np.asarray(p, dtype=float)
        return np.maximum(np.abs(lz.ip(p, p)), np.abs(lz.ip(p, self.q) + 1.0))


def make_spaceform(K: float) -> SpaceForm:
    """Standard model of curvature K.

    K = 0: q = e3 + e4, o = (e4 - e3)/2.  K > 0: q = sqrt(K) e4.  K < 0:
    q = sqrt(-K) e3.  In the curved cases o = q / K.
    """
    K = float(K)
    if K == 0.0:
        q = lz.basis(3) + lz.basis(4)
        o = 0.5 * (lz.basis(4) - lz.basis(3))
    elif K > 0:
        q = np.sqrt(K) * lz.basis(4)
        o = q / K
    else:
        q = np.sqrt(-K) * lz.basis(3)
        o = q / K
    sf = SpaceForm(q=q, o=o)
    sf.validate()
    return sf


def spaceform_from_vectors(q, o) -> SpaceForm:
    """Explicit q and o; validated."""
    sf = SpaceForm(q=np.asarray(q, dtype=float), o=np.asarray(o, dtype=float))
    sf.validate(tol=1e-10)
    return sf


def orthogonal_basis(sf: SpaceForm):
    """Orthogonal basis a0..a3 of q^perp in the standard models.

    K = 0 gives (e0, e1, e2, q); K > 0 gives (e0, e1, e2, e3); K < 0 gives
    (e0, e1, e2, e4).  For nonstandard q a Gram-Schmidt pass is used.
    """
    K = sf.K
    E = np.eye(lz.DIM)
    if abs(K) < 1e-14:
        if np.allclose(sf.q, E[3] + E[4]):
            return np.array([E[0], E[1], E[2], sf.q])
        # null q: any complement of span(q, o) plus q itself
        P = _orthonormal_complement([sf.q, sf.o])
        return np.vstack([P, sf.q])
    if np.allclose(sf.q / np.sqrt(abs(K)), E[4]):
        return E[:4].copy()
    if np.allclose(sf.q / np.sqrt(abs(K)), E[3]):
        return E[[0, 1, 2, 4]].copy()
    return _orthonormal_complement([sf.q])


def _orthonormal_complement(vectors):
    # ip-orthonormal basis of the orthogonal complement of span(vectors); span must be nondegenerate
    W = [np.asarray(v, dtype=float) for v in vectors]
    A = np.array(W) * lz.SIGN
    _, _, vt = np.linalg.svd(A)
    cands = list(vt[len(W):])
    out = []
    for c in cands:
        for b in out:
            c = c - lz.ip(c, b) / lz.ip(b, b) * b
        n = lz.ip(c, c)
        out.append(c / np.sqrt(abs(n)))
    return np.array(out)


def killing_basis(sf: SpaceForm) -> np.ndarray:
    """Six bivectors spanning Lambda^2 q^perp, ordered
    (a0^a1, a0^a2, a0^a3, a1^a2, a1^a3, a2^a3).

    For K = 0 the elements containing a3 = q (indices 2, 4, 5) are
    translations and the others rotations about the chart origin.
    """
    a = orthogonal_basis(sf)
    order = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    return np.array([lz.wedge(a[i], a[j]) for i, j in order])


KILLING_LABELS = ("a0^a1", "a0^a2", "a0^a3", "a1^a2", "a1^a3", "a2^a3")


def lift_euclidean(sf: SpaceForm, x0):
    """x = o + x0 + |x0|^2 q / 2 for x0 in span(e0, e1, e2)."""
    if abs(sf.K) > 1e-14:
        raise ValueError("Euclidean chart needs K = 0")
    x0 = _embed3(x0)
    s = np.sum(x0 * x0, axis=-1)
    return sf.o + x0 + 0.5 * s[..., None] * sf.q


def unlift_euclidean(sf: SpaceForm, x):
    """Chart coordinates (e0, e1, e2 components) of a point or tangent vector."""
    return np.asarray(x, dtype=float)[..., :3]


def lift_pseudosphere(sf: SpaceForm, x0, tol=MEMBERSHIP_TOL):
    """x = x0 + o for x0 in q^perp with <x0, x0> = 1/K."""
    K = sf.K
    if abs(K) < 1e-14:
        raise ValueError("pseudosphere chart needs K != 0")
    x0 = np.asarray(x0, dtype=float)
    if np.any(np.abs(lz.ip(x0, sf.q)) > tol):
        raise ValueError("chart point is not orthogonal to q")
    if np.any(np.abs(lz.ip(x0, x0) - 1.0 / K) > tol):
        raise ValueError("chart point does not satisfy <x0, x0> = 1/K")
    return x0 + sf.o


def _embed3(x0):
    x0 = np.asarray(x0, dtype=float)
    if x0.shape[-1] == 3:
        out = np.zeros(x0.shape[:-1] + (lz.DIM,))
        out[..., :3] = x0
        return out
    return x0


def conformal_field_at(sf: SpaceForm, Y, p, tol=MEMBERSHIP_TOL):
    """Conformal vector field of Y at p in M_q: -Yp - <Yp, q> p."""
    p = np.asarray(p, dtype=float)
    if np.any(sf.membership_residual(p) > tol):
        raise ValueError("point is not on M_q")
    Yp = lz.apply(Y, p)
    return -Yp - lz.ip(Yp, sf.q)[..., None] * p


def annihilates_q(sf: SpaceForm, Y, tol=1e-12):
    return bool(np.all(np.abs(lz.apply(Y, sf.q)) <= tol * max(1.0, np.abs(Y).max())))
