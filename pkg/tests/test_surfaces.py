import numpy as np
import pytest

from cmcmoment import lorentz as lz
from cmcmoment.geometry import point_geometry
from cmcmoment.spaceform import make_spaceform
from cmcmoment.surfaces import FAMILIES, catalog, jet, make_family, third_order_data

CMC = [("sphere", {}), ("cylinder", {}), ("unduloid", {}), ("product_torus_s3", {"r1": 0.6}),
       ("product_torus_s3", {}), ("sphere_s3", {"beta": 1.0}), ("equidistant_tube_h3", {})]


def sample(fam, rng, n=25):
    lohi = []
    for lo, hi in fam.domain:
        lohi.append((0.0 if lo is None else lo + 0.05, 6.0 if hi is None else hi - 0.05))
    u = rng.uniform(*lohi[0], n)
    v = rng.uniform(*lohi[1], n)
    return u, v


@pytest.mark.parametrize("kind,params", CMC + [("perturbed_cylinder", {})])
def test_jet_invariants(kind, params, rng):
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    j = third_order_data(fam, sf, *sample(fam, rng))
    assert np.max(j.invariant_residuals(sf)) <= 1e-9
    D = j.d1()
    gram = np.einsum("...ak,...bk,k->...ab", D, D, lz.SIGN)
    assert np.all(np.linalg.det(gram) > 0)


@pytest.mark.parametrize("kind,params", CMC)
def test_analytic_mean_curvature(kind, params, rng):
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    g = point_geometry(sf, jet(fam, sf, *sample(fam, rng, 100)))
    np.testing.assert_allclose(g.H, fam.H, atol=1e-8)


def test_reference_values():
    assert make_family("sphere").H == 1.0
    assert make_family("cylinder").H == 0.5
    assert make_family("product_torus_s3").H == pytest.approx(0.0, abs=1e-15)
    # tube about a geodesic in H^3: principal curvatures coth(rho) and tanh(rho)
    rho = 0.6
    assert make_family("equidistant_tube_h3", rho=rho).H == pytest.approx(
        0.5 * (1 / np.tanh(rho) + np.tanh(rho)), rel=1e-12)
    # product torus: principal curvatures r2/r1 and -r1/r2
    r1 = 0.6
    r2 = np.sqrt(1 - r1 * r1)
    assert make_family("product_torus_s3", r1=r1).H == pytest.approx(0.5 * (r2 / r1 - r1 / r2))


def test_sphere_third_derivatives_match_finite_differences():
    fam = make_family("sphere", r=1.3)
    sf = make_spaceform(0)
    u, v, h = 0.9, 0.4, 1e-4
    j3 = third_order_data(fam, sf, u, v)
    fd_uuu = (jet(fam, sf, u + h, v).xuu - jet(fam, sf, u - h, v).xuu) / (2 * h)
    fd_uuv = (jet(fam, sf, u, v + h).xuu - jet(fam, sf, u, v - h).xuu) / (2 * h)
    fd_uvv = (jet(fam, sf, u + h, v).xvv - jet(fam, sf, u - h, v).xvv) / (2 * h)
    fd_vvv = (jet(fam, sf, u, v + h).xvv - jet(fam, sf, u, v - h).xvv) / (2 * h)
    for a, b in [(j3.xuuu, fd_uuu), (j3.xuuv, fd_uuv), (j3.xuvv, fd_uvv), (j3.xvvv, fd_vvv)]:
        np.testing.assert_allclose(a, b, atol=1e-6)


def test_unduloid_third_derivatives_match_finite_differences():
    fam = make_family("unduloid")
    sf = make_spaceform(0)
    u, v, h = 0.3, 1.7, 1e-4
    j3 = third_order_data(fam, sf, u, v)
    fd = (jet(fam, sf, u, v + h).xvv - jet(fam, sf, u, v - h).xvv) / (2 * h)
    np.testing.assert_allclose(j3.xvvv, fd, atol=1e-6)


def test_cylinder_closed_form_third_derivatives():
    r = 1.7
    fam = make_family("cylinder", r=r)
    sf = make_spaceform(0)
    u = 0.8
    j3 = third_order_data(fam, sf, u, 0.3)
    np.testing.assert_allclose(j3.xuuu[:3], -r * np.array([-np.sin(u), np.cos(u), 0.0]), atol=1e-14)
    np.testing.assert_allclose(j3.xvvv, 0, atol=1e-14)


@pytest.mark.parametrize("kind,params", CMC + [("perturbed_cylinder", {})])
def test_periodicity(kind, params):
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    u, v = 0.7, 0.5
    j = jet(fam, sf, u, v)
    if fam.u_period:
        jp = jet(fam, sf, u + fam.u_period, v)
        for a, b in zip(j.d2().ravel(), jp.d2().ravel()):
            assert a == pytest.approx(b, abs=1e-12)
    if fam.v_period:
        jp = jet(fam, sf, u, v + fam.v_period)
        np.testing.assert_allclose(jp.d2(), j.d2(), atol=1e-12)


def test_unduloid_profile(rng):
    fam = make_family("unduloid", H=0.5, necksize=0.5)
    prof = fam.profile
    s = rng.uniform(0, prof.length, 100)
    assert np.max(np.abs(prof.first_integral_residual(s))) < 1e-10
    rho = prof.state(s)[0]
    # radius oscillates between the neck a and the bulge 1/H - a
    assert rho.min() >= 0.5 - 1e-9 and rho.max() <= 1.5 + 1e-9
    assert prof.bulge == pytest.approx(1.5, abs=1e-9)
    sf = make_spaceform(0)
    g = point_geometry(sf, jet(fam, sf, rng.uniform(0, 6, 100), s))
    assert np.max(np.abs(g.H - 0.5)) < 1e-8
    # no umbilic points: A0 never vanishes along the profile
    assert not np.any(g.is_umbilic())


def test_unduloid_rejects_bad_necksize():
    with pytest.raises(ValueError):
        make_family("unduloid", H=0.5, necksize=1.2)


def test_perturbed_cylinder_is_not_cmc(rng):
    fam = make_family("perturbed_cylinder", eps=0.1)
    sf = make_spaceform(0)
    g = point_geometry(sf, jet(fam, sf, *sample(fam, rng, 200)))
    spread = g.H.max() - g.H.min()
    assert 0.02 < spread < 0.5


def test_domain_and_curvature_errors():
    fam = make_family("sphere")
    with pytest.raises(ValueError):
        jet(fam, make_spaceform(0), 0.0, 0.0)
    with pytest.raises(ValueError):
        jet(fam, make_spaceform(1), 1.0, 0.0)
    with pytest.raises(ValueError):
        make_family("catenoid")


def test_jet_map_applies_linear_map(rng):
    from scipy.linalg import expm
    from cmcmoment.spaceform import killing_basis
    fam = make_family("cylinder")
    sf = make_spaceform(0)
    g = expm(np.einsum("i,ijk->jk", rng.normal(size=6), lz.as_matrix(killing_basis(sf))))
    j = jet(fam, sf, 0.2, 0.3)
    jm = j.map(g)
    np.testing.assert_allclose(jm.xuv, g @ j.xuv)
    assert np.max(jm.invariant_residuals(sf)) < 1e-10


def test_catalog_lists_every_family():
    rows = catalog()
    kinds = {r["kind"] for r in rows}
    assert kinds == set(FAMILIES)
    assert {"unduloid", "product_torus_s3"} <= kinds
    assert all("K" in r for r in rows)
