import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import observed_order
from imcf_lab import AxisymGrid, WarpedProfile, diameter, off_center_sphere, surface_geometry, surface_integral
from imcf_lab.errors import GridMismatch, NonGraphical, RadiusOutOfDomain
from imcf_lab.surface import surface_operators

FLAT = WarpedProfile.flat()


def test_grid():
    g = AxisymGrid(64)
    assert np.all((g.theta > 0) & (g.theta < math.pi))
    assert g.weights.sum() == pytest.approx(4 * math.pi, rel=1e-14)


def test_round_leaf_fields():
    st2 = surface_geometry(FLAT, np.full(64, 2.0))
    np.testing.assert_allclose(st2.H, 1.0, atol=1e-14)
    assert st2.area == pytest.approx(16 * math.pi, rel=1e-14)
    assert surface_integral(st2, st2.H**2) == pytest.approx(16 * math.pi, rel=1e-14)
    np.testing.assert_allclose(st2.K, 0.25, rtol=1e-12)
    s = surface_geometry(WarpedProfile.schwarzschild(0.2), np.full(64, 2.0))
    np.testing.assert_allclose([s.lam1, s.lam2], math.sqrt(0.8) / 2, rtol=1e-14)
    assert surface_integral(s, s.H**2) == pytest.approx(0.8 * 16 * math.pi, rel=1e-13)
    assert np.max(np.abs(s.lam1 - s.lam2)) <= 1e-10


def test_off_center_sphere_order():
    errs = []
    for n in (32, 64, 128):
        g = AxisymGrid(n)
        st_ = surface_geometry(FLAT, off_center_sphere(g, 1.0, 0.3), g)
        errs.append(np.max(np.abs(st_.H - 2)))
    assert errs[1] < 3e-4
    order = observed_order(errs)
    assert np.all((order > 1.8) & (order < 2.2))


def test_gauss_bonnet_and_equation():
    g = AxisymGrid(64)
    rho = 1 + 0.1 * g.legendre(2)
    for prof in (FLAT, WarpedProfile.schwarzschild(0.1)):
        s = surface_geometry(prof, rho, g)
        assert surface_integral(s, s.K) / (4 * math.pi) == pytest.approx(1, abs=1e-3)
        np.testing.assert_allclose(s.K, s.K12 + s.lam_t * s.lam_p, atol=1e-12)
        np.testing.assert_allclose(s.H, s.lam1 + s.lam2, atol=1e-12)
        np.testing.assert_allclose((s.lam1 - s.lam2) ** 2, 2 * s.A_norm2 - s.H**2, atol=1e-12)


def test_operators_examples():
    g = AxisymGrid(128)
    c = np.cos(g.theta)
    s1 = surface_geometry(FLAT, np.ones(128), g)
    grad2, lap = surface_operators(s1, c)
    np.testing.assert_allclose(lap, -2 * c, atol=5e-4)
    s2 = surface_geometry(FLAT, np.full(128, 2.0), g)
    grad2, _ = surface_operators(s2, c)
    np.testing.assert_allclose(grad2, np.sin(g.theta) ** 2 / 4, atol=1e-4)
    z = surface_operators(s1, np.full(128, 3.0))
    assert not np.any(z[0]) and not np.any(z[1])


@settings(max_examples=30, deadline=None)
@given(coef=st.lists(st.floats(-1, 1), min_size=1, max_size=8),
       eps=st.floats(-0.15, 0.15), ell=st.integers(1, 4))
def test_discrete_divergence_theorem(coef, eps, ell):
    g = AxisymGrid(48)
    s = surface_geometry(FLAT, 1 + eps * g.legendre(ell), g)
    f = np.polynomial.legendre.legval(np.cos(g.theta), coef)
    _, lap = surface_operators(s, f)
    assert abs(surface_integral(s, lap)) <= 1e-8 * (np.max(np.abs(f)) + 1e-300) * s.area + 1e-13


def test_diameter():
    g = AxisymGrid(64)
    for rv in (1.0, 2.0):
        d = diameter(surface_geometry(FLAT, np.full(64, rv), g))
        assert d == pytest.approx(math.pi * rv, rel=0.02)
    d = diameter(surface_geometry(FLAT, 1 + 0.1 * g.legendre(2), g))
    assert 0.9 * math.pi < d < 1.2 * math.pi


def test_errors_and_csv(tmp_path):
    g = AxisymGrid(32)
    with pytest.raises(GridMismatch):
        surface_geometry(FLAT, np.ones(31), g)
    with pytest.raises(RadiusOutOfDomain):
        surface_geometry(WarpedProfile.schwarzschild(0.5), np.full(32, 0.9), g)
    with pytest.raises(NonGraphical):
        surface_geometry(FLAT, 1 + 0.45 * g.legendre(12), g, tilt_cap=2.0)
    s = surface_geometry(FLAT, np.ones(32), g)
    with pytest.raises(GridMismatch):
        surface_integral(s, np.ones(5))
    path = tmp_path / "leaf.csv"
    s.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta,rho,H,lambda1,lambda2,K,Rc_nn,K12,area_element"
    assert len(lines) == 33
