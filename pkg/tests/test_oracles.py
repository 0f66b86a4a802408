"""Closed-form and symbolic oracles, derived without the package's formulas.

Each oracle below is computed from scratch (sympy for curvature, scipy quad
for the 1D distance integral, hand algebra for round leaves) and frozen as
a literal or recomputed here, then compared with the lattice code.
"""

import math

import numpy as np
import pytest
import sympy as sp
from scipy.integrate import quad

from imcf_lab import WarpedProfile, ambient_curvatures, hawking_mass, prototype_metric, sobolev_distance
from imcf_lab.ambient import ambient_christoffels
from imcf_lab.chain import model_lapse2
from imcf_lab.lattice import delta_christoffels
from imcf_lab.surface import AxisymGrid, surface_geometry

r, th, ph, t, psi = sp.symbols("r theta phi t psi", positive=True)
m_sym = sp.Rational(1, 5)


def _christoffel(g, x):
    ginv = g.inv()
    n = len(x)
    return [[[sp.simplify(sum(ginv[a, d] * (sp.diff(g[d, b], x[c]) + sp.diff(g[d, c], x[b])
                                              - sp.diff(g[b, c], x[d])) for d in range(n)) / 2)
              for c in range(n)] for b in range(n)] for a in range(n)]


def _riemann_curvatures(V):
    """(R, Rc(nu,nu) unit radial, sectional curvature of the theta-phi plane)."""
    x = (r, th, ph)
    g = sp.diag(1 / V, r**2, r**2 * sp.sin(th) ** 2)
    Gam = _christoffel(g, x)

    def riem(a, b, c, d):  # R^a_{bcd}
        expr = sp.diff(Gam[a][d][b], x[c]) - sp.diff(Gam[a][c][b], x[d])
        expr += sum(Gam[a][c][e] * Gam[e][d][b] - Gam[a][d][e] * Gam[e][c][b] for e in range(3))
        return expr

    ric = sp.Matrix(3, 3, lambda b, d: sp.simplify(sum(riem(a, b, a, d) for a in range(3))))
    R = sp.simplify(sum(g.inv()[i, j] * ric[i, j] for i in range(3) for j in range(3)))
    Rc_nn = sp.simplify(ric[0, 0] * V)
    R_thph = sp.simplify(sum(g[1, a] * riem(a, 2, 1, 2) for a in range(3)))
    K12 = sp.simplify(R_thph / (g[1, 1] * g[2, 2]))
    return R, Rc_nn, K12


PROFILES = {
    "flat": (sp.Integer(1), WarpedProfile.flat()),
    "schwarzschild": (1 - 2 * m_sym / r, WarpedProfile.schwarzschild(0.2)),
    "hyperbolic": (1 + r**2, WarpedProfile.hyperbolic()),
    "adss": (1 + r**2 - 2 * m_sym / r, WarpedProfile.adss(0.2)),
}


@pytest.mark.parametrize("kind", list(PROFILES))
def test_symbolic_curvature_matches(kind):
    V, prof = PROFILES[kind]
    R, Rc, K12 = _riemann_curvatures(V)
    for rv in (0.7, 1.3, 2.0, 5.0):
        if rv <= prof.r_min:
            continue
        got = ambient_curvatures(prof, rv)
        want = [float(e.subs({r: rv, th: 0.9})) for e in (R, Rc, K12)]
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)


def test_symbolic_christoffels_match():
    V = 1 - 2 * m_sym / r
    Gam = _christoffel(sp.diag(1 / V, r**2, r**2 * sp.sin(th) ** 2), (r, th, ph))
    got = ambient_christoffels(WarpedProfile.schwarzschild(0.2), 1.7, 0.8)
    want = np.array([[[float(Gam[a][b][c].subs({r: 1.7, th: 0.8})) for c in range(3)]
                      for b in range(3)] for a in range(3)])
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)


def test_delta_christoffels_from_metric():
    r0 = sp.Integer(2)
    g = sp.diag(r0**2 / 4 * sp.exp(t), r0**2 * sp.exp(t), r0**2 * sp.exp(t) * sp.sin(psi) ** 2)
    Gam = _christoffel(g, (t, psi, ph))
    psis = np.array([0.3, 1.1, 2.5])
    got = delta_christoffels(psis)
    for j, pv in enumerate(psis):
        want = np.array([[[float(Gam[a][b][c].subs({psi: pv, t: 0.4})) for c in range(3)]
                          for b in range(3)] for a in range(3)])
        np.testing.assert_allclose(got[j], want, atol=1e-14)


# round-leaf masses by hand: H = 2 sqrt(V) / r, |Sigma| = 4 pi r^2
@pytest.mark.parametrize("kind,variant,rv,expected", [
    ("flat", "euclidean", 1.7, 0.0),
    ("schwarzschild", "euclidean", 2.0, 0.2),
    ("hyperbolic", "hyperbolic", 1.0, 0.0),
    ("adss", "hyperbolic", 2.0, 0.2),
])
def test_round_masses(kind, variant, rv, expected):
    prof = PROFILES[kind][1]
    state = surface_geometry(prof, np.full(64, rv))
    assert hawking_mass(state, variant) == pytest.approx(expected, abs=1e-10)


def test_prototype_lapse_values():
    assert model_lapse2("pmt-hyperbolic", 1.0, 0.0, 0.0) == pytest.approx(1 / 8, abs=1e-15)
    assert model_lapse2("rpi-adss", 2.0, 0.2, 0.0) == pytest.approx(0.25 / 1.2, abs=1e-15)
    # flat lapse equals 1/H^2 of the round flow r = r0 e^{t/2}
    assert model_lapse2("pmt-flat", 2.0, 0.0, 1.0) == pytest.approx((2 * math.exp(0.5)) ** 2 / 4)


def test_gS_delta_distance_matches_1d_quadrature():
    r0, m, T = 2.0, 0.2, 2.0

    def lapse_gap2(s):
        nS = 0.25 * r0**2 * math.exp(s) / (1 - 2 * m / r0 * math.exp(-s / 2))
        nd = 0.25 * r0**2 * math.exp(s)
        # |h|^2_delta = (h_tt / delta_tt)^2, dV = (r0^3/2) e^{3s/2} sin psi dpsi dphi ds
        return ((nS - nd) / nd) ** 2 * 0.5 * r0**3 * math.exp(1.5 * s) * 4 * math.pi

    oracle = quad(lapse_gap2, 0, T, epsabs=0, epsrel=1e-13)[0]
    grid = AxisymGrid(64)
    times = np.linspace(0, T, 257)
    a = prototype_metric("rpi-schwarzschild", r0, m, grid=grid, times=times)
    b = prototype_metric("pmt-flat", r0, 0.0, grid=grid, times=times)
    assert sobolev_distance(a, b, "L2", squared=True) == pytest.approx(oracle, rel=1e-6)


def test_schwarzschild_area_derivative_closed_form():
    # int H^2 dmu = 16 pi (1 - 2m/r), r = r0 e^{t/2}  =>  d/dt = (16 pi / r0) m e^{-t/2}
    r0, m = 2.0, 0.2
    assert 16 * math.pi / r0 * m == pytest.approx(5.026548245743669, rel=1e-15)


def test_flat_ricci_margin_closed_form_is_zero():
    # flat round leaf: |A|^2 = H^2/2, d_t H^2 = -H^2, so 4|A|^4 = (d_t H^2)^2 pointwise
    for tv in np.linspace(0, 2, 5):
        H2 = 4 * math.exp(-tv)
        assert 4 * (H2 / 2) ** 2 - (-H2) ** 2 == 0.0
