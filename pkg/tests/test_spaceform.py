import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cmcmoment import lorentz as lz
from cmcmoment.spaceform import (annihilates_q, conformal_field_at, killing_basis, lift_euclidean,
                                 lift_pseudosphere, make_spaceform, spaceform_from_vectors,
                                 unlift_euclidean)

E = np.eye(5)
point3 = arrays(np.float64, 3, elements=st.floats(-5, 5, allow_nan=False))


def test_standard_models():
    sf = make_spaceform(0)
    assert lz.ip(sf.q, sf.q) == 0 and lz.ip(sf.o, sf.q) == -1 and lz.ip(sf.o, sf.o) == 0
    sf = make_spaceform(1)
    np.testing.assert_allclose(sf.q, E[4])
    np.testing.assert_allclose(sf.o, E[4])
    sf = make_spaceform(-1)
    np.testing.assert_allclose(sf.q, E[3])
    np.testing.assert_allclose(sf.o, -E[3])
    for K in (0.0, 2.5, -0.3):
        sf = make_spaceform(K)
        assert sf.K == pytest.approx(K)
        assert lz.ip(sf.o, sf.q) == pytest.approx(-1.0)


def test_rejects_bad_origin():
    with pytest.raises(ValueError):
        spaceform_from_vectors(E[3] + E[4], E[0])


def test_lift_euclidean_examples():
    sf = make_spaceform(0)
    np.testing.assert_allclose(lift_euclidean(sf, np.zeros(3)), sf.o)
    x = lift_euclidean(sf, [1.0, 0, 0])
    np.testing.assert_allclose(x, sf.o + E[0] + 0.5 * sf.q)
    assert lz.ip(x, x) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        lift_euclidean(make_spaceform(1), np.zeros(3))


@given(point3, point3)
def test_lift_is_isometric(x0, y0):
    sf = make_spaceform(0)
    d = lift_euclidean(sf, x0) - lift_euclidean(sf, y0)
    assert lz.ip(d, d) == pytest.approx(np.sum((x0 - y0) ** 2), abs=1e-9 * (1 + np.sum(x0**2 + y0**2)))
    x = lift_euclidean(sf, x0)
    assert sf.membership_residual(x) <= 1e-10 * (1 + np.sum(x0**2))
    np.testing.assert_allclose(unlift_euclidean(sf, x), x0)


def test_lift_pseudosphere_examples():
    sf = make_spaceform(1)
    np.testing.assert_allclose(lift_pseudosphere(sf, E[0]), E[0] + E[4])
    np.testing.assert_allclose(lift_pseudosphere(sf, E[1]), E[1] + E[4])
    sf = make_spaceform(-1)
    np.testing.assert_allclose(lift_pseudosphere(sf, E[4]), E[4] - E[3])
    with pytest.raises(ValueError):
        lift_pseudosphere(sf, E[0])


@pytest.mark.parametrize("K", [0.0, 1.0, -1.0, 0.4])
def test_killing_basis(K):
    sf = make_spaceform(K)
    Y = killing_basis(sf)
    for y in Y:
        assert annihilates_q(sf, y)
    assert np.linalg.matrix_rank(Y) == 6
    # B is nondegenerate on the basis only for K != 0; translations are B-null when q is null
    gram = lz.b_form(Y[:, None, :], Y[None, :, :])
    assert np.linalg.matrix_rank(gram) == (3 if K == 0 else 6)


def test_euclidean_basis_splits_into_translations_and_rotations(rng):
    sf = make_spaceform(0)
    Y = killing_basis(sf)
    pts = rng.normal(size=(4, 3))
    fields = np.array([[conformal_field_at(sf, y, lift_euclidean(sf, p))[:3] for p in pts] for y in Y])
    for i in (2, 4, 5):
        np.testing.assert_allclose(fields[i] - fields[i][0], 0, atol=1e-12)
    for i in (0, 1, 3):
        # linear and vanishing at the origin
        assert np.allclose(conformal_field_at(sf, Y[i], sf.o), 0)
        A = np.linalg.lstsq(pts, fields[i], rcond=None)[0]
        np.testing.assert_allclose(pts @ A, fields[i], atol=1e-12)
        np.testing.assert_allclose(A, -A.T, atol=1e-12)


def test_translation_field_at_origin():
    sf = make_spaceform(0)
    np.testing.assert_allclose(conformal_field_at(sf, lz.wedge(sf.q, E[0]), sf.o), E[0], atol=1e-15)


@pytest.mark.parametrize("K", [0.0, 1.0, -1.0])
def test_field_identity_and_tangency(K, rng):
    """<Y(p), v> = B(Y, p ^ v) for tangent v; Y(p) is tangent to M_q."""
    sf = make_spaceform(K)
    Y = killing_basis(sf)
    for _ in range(50):
        y = rng.normal(size=6) @ Y
        if K == 0:
            p = lift_euclidean(sf, rng.normal(size=3))
        else:
            w = rng.normal(size=5)
            if K > 0:
                w[4] = 0
                x0 = w / np.sqrt(lz.ip(w, w) * K)
            else:
                w[3] = 0
                w[4] = np.sqrt(1 + np.sum(w[:3] ** 2))
                x0 = w / np.sqrt(-K)
            p = lift_pseudosphere(sf, x0)
        v = rng.normal(size=5)
        # project to T_p M_q = {p, q}^perp
        B = np.array([p, sf.q])
        Gm = np.array([[lz.ip(a, b) for b in B] for a in B])
        v = v - np.linalg.solve(Gm, [lz.ip(v, a) for a in B]) @ B
        Yp = conformal_field_at(sf, y, p)
        assert abs(lz.ip(Yp, p)) < 1e-10 and abs(lz.ip(Yp, sf.q)) < 1e-10
        assert abs(lz.ip(Yp, v) - lz.b_form(y, lz.wedge(p, v))) < 1e-10


def test_stabilizer_gives_zero_field():
    sf = make_spaceform(0)
    # e1 ^ e2 fixes the origin o
    assert np.allclose(conformal_field_at(sf, lz.wedge(E[1], E[2]), sf.o), 0)


def test_field_rejects_points_off_the_conic():
    sf = make_spaceform(0)
    with pytest.raises(ValueError):
        conformal_field_at(sf, lz.wedge(E[0], E[1]), E[0])
