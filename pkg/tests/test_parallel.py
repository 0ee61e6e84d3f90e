import numpy as np
import pytest

from cmcmoment import lorentz as lz
from cmcmoment.calculus import family_cycles
from cmcmoment.geometry import point_geometry
from cmcmoment.parallel import (double_parallel_jet, m_roots, minus_reflection, parallel_jet,
                                sheet_sign, verify_parallel)
from cmcmoment.spaceform import make_spaceform
from cmcmoment.surfaces import jet, make_family, third_order_data


def test_roots_examples():
    assert m_roots(0.0, 1.0).roots == (1.0, -1.0)
    r = m_roots(0.5, 0.0)
    assert r.roots == (1.0,) and r.rejected[0][0] == 0.0
    assert m_roots(0.0, 0.0).roots == ()
    with pytest.raises(ValueError):
        m_roots(0.1, -1.0)


def test_roots_prefer_largest_modulus_for_negative_curvature():
    r = m_roots(-1.2, -1.0)
    assert abs(r.roots[0]) >= abs(r.roots[1])
    for m in r.roots:
        assert m * m - 2 * -1.2 * m + 1.0 == pytest.approx(0.0, abs=1e-12)


def grid(fam):
    u = np.linspace(0.2, 2.4, 5)
    v = np.linspace(0.3, 2.0, 5)
    return np.meshgrid(u, v, indexing="ij")


def test_cylinder_parallel_is_bonnet_offset():
    fam = make_family("cylinder")
    sf = make_spaceform(0)
    U, V = grid(fam)
    j3 = third_order_data(fam, sf, U, V)
    N = point_geometry(sf, j3).N
    xh = parallel_jet(sf, j3, 1.0).x
    np.testing.assert_allclose(xh[..., :3], j3.x[..., :3] + N[..., :3] / fam.H, atol=1e-10)


def test_parallel_first_derivatives_match_finite_differences():
    fam = make_family("unduloid")
    sf = make_spaceform(0)
    u, v, h = 0.7, 1.3, 1e-5
    f = lambda uu, vv: parallel_jet(sf, third_order_data(fam, sf, uu, vv), 1.0, H=fam.H)
    j = f(u, v)
    np.testing.assert_allclose(j.xu, (f(u + h, v).x - f(u - h, v).x) / (2 * h), atol=1e-8)
    np.testing.assert_allclose(j.xv, (f(u, v + h).x - f(u, v - h).x) / (2 * h), atol=1e-8)
    np.testing.assert_allclose(j.xuv, (f(u, v + h).xu - f(u, v - h).xu) / (2 * h), atol=1e-7)
    np.testing.assert_allclose(j.xvv, (f(u, v + h).xv - f(u, v - h).xv) / (2 * h), atol=1e-7)


def test_minimal_torus_parallel_is_minimal():
    fam = make_family("product_torus_s3")
    sf = make_spaceform(1)
    U, V = grid(fam)
    for m in (1.0, -1.0):
        jh = parallel_jet(sf, third_order_data(fam, sf, U, V), m)
        assert np.max(sf.membership_residual(jh.x)) < 1e-10
        assert np.max(np.abs(point_geometry(sf, jh).H)) < 1e-10


@pytest.mark.parametrize("kind,params", [("cylinder", {}), ("unduloid", {}), ("product_torus_s3", {"r1": 0.6}),
                                         ("product_torus_s3", {}), ("equidistant_tube_h3", {})])
def test_verify_parallel(kind, params):
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    U, V = grid(fam)
    for m in m_roots(fam.H, sf.K).roots:
        rep = verify_parallel(sf, fam, m, U, V, family_cycles(fam)[:2])
        assert rep.passed, [c.as_dict() for c in rep.failures()]
        assert set(rep.periods_x) == set(rep.periods_xhat)


def test_conformal_factor_needs_scaling():
    """The induced metric is -det(A0)/(H^2 + K) times I; without the scaling the
    relation only holds when H^2 + K = 1."""
    for kind, params, unit in [("cylinder", {"r": 1.0}, False), ("cylinder", {"r": 0.5}, True),
                               ("product_torus_s3", {}, True), ("unduloid", {}, False)]:
        fam = make_family(kind, **params)
        sf = make_spaceform(fam.K)
        m = m_roots(fam.H, sf.K).roots[0]
        rep = verify_parallel(sf, fam, m, *grid(fam))
        assert rep.check("conformal").passed
        assert rep.check("conformal_unscaled").passed == unit


def test_umbilic_points_rejected():
    fam = make_family("sphere")
    sf = make_spaceform(0)
    with pytest.raises(ValueError):
        parallel_jet(sf, third_order_data(fam, sf, 1.0, 0.5), 1.0)


@pytest.mark.parametrize("kind,params", [("product_torus_s3", {"r1": 0.6}), ("equidistant_tube_h3", {})])
def test_double_parallel(kind, params):
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    U, V = grid(fam)
    j3 = third_order_data(fam, sf, U, V)
    mp, mm = m_roots(fam.H, sf.K).roots
    # same root: x itself; conjugate root: minus the reflection of x
    np.testing.assert_allclose(double_parallel_jet(sf, j3, mp, mp, fam.H).x, j3.x, atol=1e-9)
    np.testing.assert_allclose(double_parallel_jet(sf, j3, mp, mm, fam.H).x, minus_reflection(sf, j3.x), atol=1e-9)
    # the two parallel surfaces are related by minus the reflection
    xp = parallel_jet(sf, j3, mp, H=fam.H).x
    xm = parallel_jet(sf, j3, mm, H=fam.H).x
    np.testing.assert_allclose(xm, minus_reflection(sf, xp), atol=1e-9)


def test_minus_reflection_preserves_conic(rng):
    sf = make_spaceform(-1)
    fam = make_family("equidistant_tube_h3")
    x = jet(fam, sf, rng.uniform(0, 6, 10), rng.uniform(-2, 2, 10)).x
    assert np.max(sf.membership_residual(minus_reflection(sf, x))) < 1e-10


def test_tube_max_root_stays_on_sheet():
    fam = make_family("equidistant_tube_h3")
    sf = make_spaceform(-1)
    U, V = grid(fam)
    j3 = third_order_data(fam, sf, U, V)
    mp, mm = m_roots(fam.H, sf.K).roots
    s = sheet_sign(sf, j3.x)
    assert np.all(sheet_sign(sf, parallel_jet(sf, j3, mp, H=fam.H).x) == s)
    assert np.all(sheet_sign(sf, parallel_jet(sf, j3, mm, H=fam.H).x) == -s)
