import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imcf_lab import WarpedProfile, ambient_curvatures, profile_eval, round_sphere_data
from imcf_lab.ambient import ambient_christoffels
from imcf_lab.errors import PoleSingularity, RadiusOutOfDomain


def test_profile_values():
    assert tuple(profile_eval(WarpedProfile.flat(), 2.0)) == (1.0, 0.0, 0.0)
    V, dV, d2V = profile_eval(WarpedProfile.schwarzschild(0.2), 2.0)
    assert (V, dV, d2V) == pytest.approx((0.8, 0.1, -0.1), abs=1e-15)
    assert profile_eval(WarpedProfile.adss(0.2), 2.0).V == pytest.approx(4.8)


def test_horizon_and_domain():
    prof = WarpedProfile.schwarzschild(0.2)
    assert prof.r_min == 0.4
    with pytest.raises(RadiusOutOfDomain):
        profile_eval(prof, 0.4)
    assert 0 < profile_eval(prof, 0.4 + 1e-9).V < 1e-8
    assert round_sphere_data(prof, 0.4 + 1e-12).H < 1e-5
    adss = WarpedProfile.adss(0.2)
    assert adss.r_min**3 + adss.r_min - 0.4 == pytest.approx(0, abs=1e-14)
    with pytest.raises(RadiusOutOfDomain):
        profile_eval(adss, adss.r_min * 0.99)


def test_curvature_examples():
    assert tuple(ambient_curvatures(WarpedProfile.flat(), 3.0)) == (0.0, 0.0, 0.0)
    assert ambient_curvatures(WarpedProfile.hyperbolic(), 1.0) == pytest.approx((-6, -2, -1))
    assert ambient_curvatures(WarpedProfile.schwarzschild(0.2), 2.0) == pytest.approx((0, -0.05, 0.05))


def test_christoffel_examples():
    assert ambient_christoffels(WarpedProfile.flat(), 1.0, math.pi / 2)[0, 1, 1] == -1
    G = ambient_christoffels(WarpedProfile.hyperbolic(), 1.0, math.pi / 2)
    assert G[0, 1, 1] == -2
    assert G[1, 2, 2] == pytest.approx(0, abs=1e-16)
    with pytest.raises(PoleSingularity):
        ambient_christoffels(WarpedProfile.flat(), 1.0, 0.0)


def test_round_sphere_examples():
    d = round_sphere_data(WarpedProfile.flat(), 2.0)
    assert d.H == 1 and d.area == pytest.approx(16 * math.pi)
    assert round_sphere_data(WarpedProfile.schwarzschild(0.2), 2.0).H == pytest.approx(math.sqrt(0.8))
    H = round_sphere_data(WarpedProfile.hyperbolic(), 1.0).H
    assert H**2 - 4 == pytest.approx(4)


PROFILES = [WarpedProfile.flat(), WarpedProfile.schwarzschild(0.3),
            WarpedProfile.hyperbolic(), WarpedProfile.adss(0.3)]


@settings(max_examples=60, deadline=None)
@given(k=st.integers(0, 3), r=st.floats(0.05, 50))
def test_gauss_relation_round(k, r):
    prof = PROFILES[k]
    if r <= prof.r_min * 1.001:
        return
    K12 = ambient_curvatures(prof, r).K12
    lam = round_sphere_data(prof, r).lam
    assert K12 + lam**2 == pytest.approx(1 / r**2, rel=1e-12)


def test_custom_profile_reproduces_schwarzschild(tmp_path):
    r = np.linspace(0.5, 10, 2000)
    path = tmp_path / "V.csv"
    path.write_text("r,V\n" + "".join(f"{a:.17g},{1 - 0.4 / a:.17g}\n" for a in r))
    prof = WarpedProfile.from_csv(path)
    V, dV, _ = profile_eval(prof, np.array([1.0, 2.0, 5.0]))
    np.testing.assert_allclose(V, 1 - 0.4 / np.array([1.0, 2.0, 5.0]), rtol=1e-8)
    np.testing.assert_allclose(dV, 0.4 / np.array([1.0, 2.0, 5.0]) ** 2, rtol=1e-3)
    # scalar curvature is (almost) zero: the formula in V, V' is consistent
    assert abs(ambient_curvatures(prof, 2.0).R) < 1e-3


def test_custom_profile_rejects_bad_table():
    with pytest.raises(ValueError):
        WarpedProfile.from_table([1.0, 0.5, 2.0, 3.0], [1.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        WarpedProfile.from_table([1.0, 2.0], [1.0, 1.0])
