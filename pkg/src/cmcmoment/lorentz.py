"""Multilinear algebra in Minkowski space R^{4,1}.

Vectors are numpy arrays of shape ``(..., 5)`` in the basis e0..e4 with
e4 timelike.  Bivectors are arrays of shape ``(..., 10)`` holding the
coefficients of e_i ^ e_j for i < j in the order of :data:`PAIRS`.
Every function broadcasts over leading axes.
"""
from __future__ import annotations

import itertools

import numpy as np

DIM = 5
#: signature matrix, (+, +, +, +, -)
G = np.diag([1.0, 1.0, 1.0, 1.0, -1.0])
SIGN = np.diag(G).copy()

#: index pairs (i, j), i < j, labelling bivector components
PAIRS = tuple(itertools.combinations(range(DIM), 2))
NPAIRS = len(PAIRS)
_PAIR_I = np.array([p[0] for p in PAIRS])
_PAIR_J = np.array([p[1] for p in PAIRS])


def basis(i):
    """Basis vector e_i."""
    e = np.zeros(DIM)
    e[i] = 1.0
    return e


def basis_bivector(k):
    """Basis bivector e_i ^ e_j for PAIRS[k]."""
    b = np.zeros(NPAIRS)
    b[k] = 1.0
    return b


def ip(u, v):
    """Lorentzian inner product u0v0 + u1v1 + u2v2 + u3v3 - u4v4."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.sum(u * v * SIGN, axis=-1)


def wedge(a, b):
    """Exterior product a ^ b as a bivector."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., _PAIR_I] * b[..., _PAIR_J] - a[..., _PAIR_J] * b[..., _PAIR_I]


def skew(Y):
    """Antisymmetric 5x5 coefficient matrix A with A[i, j] = Y_ij."""
    Y = np.asarray(Y, dtype=float)
    A = np.zeros(Y.shape[:-1] + (DIM, DIM))
    A[..., _PAIR_I, _PAIR_J] = Y
    A[..., _PAIR_J, _PAIR_I] = -Y
    return A


def from_skew(A):
    """Inverse of :func:`skew` (reads the upper triangle)."""
    return np.asarray(A)[..., _PAIR_I, _PAIR_J]


def as_matrix(Y):
    """Endomorphism of V represented by Y, so that as_matrix(Y) @ c == apply(Y, c).

    For a ^ b this is c -> <a, c> b - <b, c> a.
    """
    return -skew(Y) @ G


def from_matrix(M):
    """Bivector of an endomorphism in so(4,1); inverse of :func:`as_matrix`."""
    return from_skew(-np.asarray(M) @ G)


def apply(Y, c):
    """Action of the bivector Y on the vector c."""
    c = np.asarray(c, dtype=float)
    return np.einsum("...ij,...j->...i", as_matrix(Y), c)


def b_form(Y1, Y2):
    """Invariant form B(Y1, Y2) = trace(Y1 Y2) / 2."""
    M = np.einsum("...ij,...jk->...ik", as_matrix(Y1), as_matrix(Y2))
    return 0.5 * np.trace(M, axis1=-2, axis2=-1)


def bivector_ip(Y1, Y2):
    """Inner product on bivectors induced by ip: <a^b, c^d> = <a,c><b,d> - <a,d><b,c>.

    Equals -b_form(Y1, Y2).
    """
    Y1 = np.asarray(Y1, dtype=float)
    Y2 = np.asarray(Y2, dtype=float)
    w = SIGN[_PAIR_I] * SIGN[_PAIR_J]
    return np.sum(Y1 * Y2 * w, axis=-1)


def adjoint(g, Y):
    """Ad(g) Y = g Y g^{-1} for g in O(4,1); on decomposables g(a^b) = ga ^ gb."""
    g = np.asarray(g, dtype=float)
    A = skew(Y)
    return from_skew(np.einsum("...ij,...jk,...lk->...il", g, A, g))


def det5(v1, v2, v3, v4, v5):
    """Volume form with det5(e0, ..., e4) = 1 (5x5 determinant of the components)."""
    M = np.stack(np.broadcast_arrays(v1, v2, v3, v4, v5), axis=-1)
    return np.linalg.det(M)


def _levi_civita_table():
    # T[m, k, l] = det5(e_m, e_i, e_j, e_k', e_l') for PAIRS[k] = (i, j), PAIRS[l] = (k', l')
    T = np.zeros((DIM, NPAIRS, NPAIRS))
    E = np.eye(DIM)
    for m in range(DIM):
        for k, (i, j) in enumerate(PAIRS):
            for l, (a, b) in enumerate(PAIRS):
                T[m, k, l] = det5(E[m], E[i], E[j], E[a], E[b])
    return T


_DET_TABLE = _levi_civita_table()


def s_eval(o, Y1, Y2):
    """S(Y1)(Y2) = det(o ^ Y1 ^ Y2).

    Expanded bilinearly over basis bivectors; each coefficient is a det5 of
    basis vectors, tabulated once at import.
    """
    o = np.asarray(o, dtype=float)
    Y1 = np.asarray(Y1, dtype=float)
    Y2 = np.asarray(Y2, dtype=float)
    return np.einsum("...m,mkl,...k,...l->...", o, _DET_TABLE, Y1, Y2)


def cofactor_vector(v1, v2, v3, v4):
    """The vector c with c . w = det5(w, v1, v2, v3, v4) for all w (Euclidean dot)."""
    E = np.eye(DIM)
    return np.stack([det5(E[i], v1, v2, v3, v4) for i in range(DIM)], axis=-1)


def lorentz_normal(v1, v2, v3, v4):
    """A vector n with ip(n, w) = det5(w, v1, v2, v3, v4); it is ip-orthogonal to every v_i."""
    return cofactor_vector(v1, v2, v3, v4) * SIGN
