import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmcmoment import lorentz as lz
from cmcmoment.calculus import (ConvergenceError, QuadratureSpec, circulation_residual, coordinate_u,
                                coordinate_v, family_cycles, flat_disk_cap, group_drift, holonomy,
                                kks_integral, line_integral, parametric, square)
from cmcmoment.forms import family_source, form_evaluator
from cmcmoment.spaceform import killing_basis, make_spaceform
from cmcmoment.surfaces import make_family


def exact_form(u, v):
    # d f for f = sin(u) cos(2 v) + u v
    return np.stack([np.cos(u) * np.cos(2 * v) + v, -2 * np.sin(u) * np.sin(2 * v) + u], axis=-1)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(order=4)
    with pytest.raises(ValueError):
        QuadratureSpec(panels=2)
    t, w = QuadratureSpec(8, 4).nodes()
    assert w.sum() == pytest.approx(1.0)
    assert np.all((t > 0) & (t < 1))
    # exact for polynomials of degree 2 * order - 1 on each panel
    assert np.sum(w * t**15) == pytest.approx(1 / 16)


def test_zero_and_exact_forms():
    cyc = square((0.3, -0.2), 0.8)
    assert np.all(line_integral(lambda u, v: np.zeros(np.shape(u) + (2,)), cyc).value == 0)
    assert abs(line_integral(exact_form, cyc).value) <= 1e-11
    # exact form on a parametric closed curve
    c = parametric(lambda t: np.stack([np.cos(2 * np.pi * t), 0.5 * np.sin(2 * np.pi * t)], -1),
                   lambda t: np.stack([-2 * np.pi * np.sin(2 * np.pi * t), np.pi * np.cos(2 * np.pi * t)], -1))
    assert abs(line_integral(exact_form, c).value) <= 1e-11


def test_circulation_of_area_form():
    # d(-v du) = du ^ dv: circulation around a ccw square is side^2
    form = lambda u, v: np.stack([-v, np.zeros_like(u)], -1)
    val, ratio = circulation_residual(form, (0.4, 0.1), 0.5)
    assert ratio == pytest.approx(1.0)


@given(st.floats(-2, 2), st.floats(0.1, 3.0))
def test_reversal_negates(anchor, period):
    form = lambda u, v: np.stack([np.cos(v) + u * 0, np.sin(u) * v], -1)
    cyc = coordinate_u(anchor, period)
    a = line_integral(form, cyc, gate=False).value
    b = line_integral(form, cyc.reversed(), gate=False).value
    assert abs(a + b) <= 1e-12 * max(1, abs(a))


def test_convergence_gate_trips():
    # oscillation far beyond the resolution of 8 x 4 nodes
    form = lambda u, v: np.stack([np.cos(300 * u) + 1, 0 * u], -1)
    with pytest.raises(ConvergenceError):
        line_integral(form, coordinate_u(0.0, 1.0), QuadratureSpec(8, 4))


def test_cylinder_meridian_flux():
    fam = make_family("cylinder")
    sf = make_spaceform(0)
    src = family_source(fam, sf)
    p = line_integral(form_evaluator(sf, src, "moment_S", killing_basis(sf)), coordinate_u(0.3))
    assert p.value[5] == pytest.approx(np.pi, abs=1e-12)
    assert p.relative_change < 1e-12


def test_repeated_cycle_doubles_period():
    fam = make_family("unduloid")
    sf = make_spaceform(0)
    src = family_source(fam, sf)
    f = form_evaluator(sf, src, "flux")
    c = coordinate_u(1.0)
    np.testing.assert_allclose(line_integral(f, c.repeated(2)).value, 2 * line_integral(f, c).value, atol=1e-12)


def eta_circulation(kind, side=1e-2, **params):
    fam = make_family(kind, **params)
    sf = make_spaceform(fam.K)
    eta = form_evaluator(sf, family_source(fam, sf), "eta")
    return np.max(np.abs(circulation_residual(eta, (0.7, 0.4), side)[1]))


def test_eta_closed_on_cylinder_not_on_control():
    assert eta_circulation("cylinder") <= 1e-6
    assert eta_circulation("perturbed_cylinder", eps=0.1) >= 1e-3


@pytest.mark.parametrize("kind,Yi", [("cylinder", 5), ("cylinder", 2), ("cylinder", 0), ("unduloid", 5),
                                     ("unduloid", 3), ("sphere", 5)])
def test_kks_matches_moment_period(kind, Yi):
    fam = make_family(kind)
    sf = make_spaceform(0)
    src = family_source(fam, sf)
    Y = killing_basis(sf)
    cyc = family_cycles(fam)[0]
    p = src(*cyc.start()).x[:3]
    cap = flat_disk_cap((0, 0, p[2]), np.hypot(p[0], p[1]), 2, phase=np.arctan2(p[1], p[0]))
    k = kks_integral(sf, src, cyc, Y[Yi], fam.H, cap)
    mu = line_integral(form_evaluator(sf, src, "moment_S", Y), cyc).value[Yi]
    assert k == pytest.approx(mu, abs=1e-8)
    if kind == "cylinder" and Yi == 5:
        assert k == pytest.approx(np.pi, abs=1e-9)


def test_kks_rejects_mismatched_cap():
    fam = make_family("cylinder")
    sf = make_spaceform(0)
    src = family_source(fam, sf)
    cap = flat_disk_cap((0, 0, 0.5), 1.0, 2)
    with pytest.raises(ValueError):
        kks_integral(sf, src, coordinate_u(0.0), killing_basis(sf)[5], 0.5, cap)


def test_holonomy_trivial_cases():
    fam = make_family("perturbed_cylinder")
    sf = make_spaceform(0)
    src = family_source(fam, sf)
    loop = square((0.5, 0.5), 0.3)
    assert np.array_equal(holonomy(sf, src, 0.0, loop), np.eye(5))


def test_holonomy_flat_on_cylinder_curved_on_control():
    sf = make_spaceform(0)
    loop = square((0.5, 0.5), 0.3)
    M = holonomy(sf, family_source(make_family("cylinder"), sf), 1.0, loop)
    assert np.linalg.norm(M - np.eye(5)) <= 1e-6
    M = holonomy(sf, family_source(make_family("perturbed_cylinder", eps=0.1), sf), 1.0, loop)
    assert np.linalg.norm(M - np.eye(5)) >= 1e-3
    assert group_drift(M) < 1e-8


def test_holonomy_of_doubled_loop_is_square():
    sf = make_spaceform(0)
    src = family_source(make_family("perturbed_cylinder", eps=0.1), sf)
    loop = square((0.5, 0.5), 0.3)
    M1 = holonomy(sf, src, 1.0, loop)
    M2 = holonomy(sf, src, 1.0, loop.repeated(2))
    np.testing.assert_allclose(M2, M1 @ M1, atol=1e-9)


def test_holonomy_vector_of_t():
    sf = make_spaceform(0)
    src = family_source(make_family("perturbed_cylinder", eps=0.1), sf)
    loop = square((0.5, 0.5), 0.3)
    Ms = holonomy(sf, src, [0.5, 2.0], loop)
    np.testing.assert_allclose(Ms[1], holonomy(sf, src, 2.0, loop), atol=1e-14)
