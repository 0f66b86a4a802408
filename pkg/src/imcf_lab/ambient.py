"""Warped-product ambient spaces ``dr^2 / V(r) + r^2 sigma``.

Every quantity here is closed form in the potential ``V`` and its first two
radial derivatives. These functions serve as the oracles that the numerical
leaf and flow code is checked against.

Sign convention: the second fundamental form is ``A(X, Y) = -<D_X Y, nu>``
with ``nu`` the outward unit normal, so centered spheres have ``H > 0``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import PoleSingularity, RadiusOutOfDomain

KINDS = ("flat", "schwarzschild", "hyperbolic", "adss", "custom")


class ProfileValues(NamedTuple):
    V: np.ndarray
    dV: np.ndarray
    d2V: np.ndarray


class AmbientCurvatures(NamedTuple):
    R: np.ndarray
    Rc_nn: np.ndarray
    K12: np.ndarray


class RoundSphere(NamedTuple):
    H: float
    lam: float
    area: float


@dataclass(frozen=True)
class WarpedProfile:
    """Rotationally symmetric ambient metric ``V(r)^-1 dr^2 + r^2 sigma``.

    Use the constructors :meth:`flat`, :meth:`schwarzschild`,
    :meth:`hyperbolic`, :meth:`adss` and :meth:`from_table`.
    """

    kind: str
    m: float = 0.0
    r_min: float = 0.0
    r_max: float = np.inf
    _interp: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    @classmethod
    def flat(cls):
        return cls("flat")

    @classmethod
    def schwarzschild(cls, m):
        if m <= 0:
            raise ValueError("schwarzschild mass must be positive")
        return cls("schwarzschild", m=float(m), r_min=2.0 * m)

    @classmethod
    def hyperbolic(cls):
        return cls("hyperbolic")

    @classmethod
    def adss(cls, m):
        if m <= 0:
            raise ValueError("adss mass must be positive")
        # horizon: r^3 + r - 2m = 0 has exactly one positive root
        rh = brentq(lambda r: r**3 + r - 2.0 * m, 0.0, 2.0 * m + 1.0, xtol=1e-15)
        return cls("adss", m=float(m), r_min=rh)

    @classmethod
    def from_kind(cls, kind, m=0.0):
        if kind == "flat":
            return cls.flat()
        if kind == "hyperbolic":
            return cls.hyperbolic()
        if kind == "schwarzschild":
            return cls.schwarzschild(m)
        if kind == "adss":
            return cls.adss(m)
        raise ValueError(f"unknown profile kind {kind!r}")

    @classmethod
    def from_table(cls, r, V, check=True):
        """Custom profile from tabulated ``(r, V)`` pairs.

        ``V`` is interpolated with a monotone cubic (PCHIP); derivatives are
        those of the interpolant. The admissible radii are the open table
        range ``(r[0], r[-1]]``.
        """
        r = np.asarray(r, dtype=float)
        V = np.asarray(V, dtype=float)
        if r.ndim != 1 or r.shape != V.shape or r.size < 4:
            raise ValueError("need at least four (r, V) pairs")
        if np.any(np.diff(r) <= 0):
            raise ValueError("r must be strictly increasing")
        prof = cls("custom", r_min=float(r[0]), r_max=float(r[-1]),
                   _interp=PchipInterpolator(r, V, extrapolate=False))
        if check:
            prof.check_derivatives()
        return prof

    @classmethod
    def from_csv(cls, path):
        """Load a custom profile from a two-column ``r,V`` CSV file."""
        rs, vs = [], []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    rs.append(float(row[0]))
                    vs.append(float(row[1]))
                except ValueError:
                    if rs:  # only a leading header line may be non-numeric
                        raise
        return cls.from_table(rs, vs)

    def check_derivatives(self, rtol=1e-6):
        """Compare V', V'' against centered differences of V at cell midpoints."""
        knots = self._interp.x
        mids = 0.5 * (knots[1:] + knots[:-1])
        h = 1e-4 * np.min(np.diff(knots))
        V0, dV, d2V = self(mids)
        Vp, _, _ = self(mids + h)
        Vm, _, _ = self(mids - h)
        fd1 = (Vp - Vm) / (2 * h)
        fd2 = (Vp - 2 * V0 + Vm) / h**2
        scale1 = np.max(np.abs(dV)) + 1.0
        scale2 = np.max(np.abs(d2V)) + 1.0
        # second differences lose ~eps/h^2 to rounding
        tol2 = max(rtol, 1e3 * np.finfo(float).eps * np.max(np.abs(V0)) / h**2 / scale2)
        if np.any(np.abs(fd1 - dV) > rtol * scale1) or np.any(np.abs(fd2 - d2V) > tol2 * scale2):
            raise ValueError("custom profile derivatives disagree with finite differences")

    def __call__(self, r):
        return profile_eval(self, r)


def _as_radius(profile, r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > profile.r_min)) or np.any(r > profile.r_max):
        raise RadiusOutOfDomain(
            f"radius outside ({profile.r_min}, {profile.r_max}] for {profile.kind} profile")
    return r


def profile_eval(profile: WarpedProfile, r) -> ProfileValues:
    """Return ``(V, V', V'')`` at radius ``r`` (scalar or array)."""
    r = _as_radius(profile, r)
    kind, m = profile.kind, profile.m
    one = np.ones_like(r)
    if kind == "flat":
        out = ProfileValues(one, 0 * r, 0 * r)
    elif kind == "schwarzschild":
        out = ProfileValues(1 - 2 * m / r, 2 * m / r**2, -4 * m / r**3)
    elif kind == "hyperbolic":
        out = ProfileValues(1 + r**2, 2 * r, 2 * one)
    elif kind == "adss":
        out = ProfileValues(1 + r**2 - 2 * m / r, 2 * r + 2 * m / r**2, 2 - 4 * m / r**3)
    else:
        f = profile._interp
        out = ProfileValues(f(r), f(r, 1), f(r, 2))
    if np.any(out.V <= 0):
        raise RadiusOutOfDomain("V <= 0: leaf touches or crosses a horizon")
    if out.V.ndim == 0:
        return ProfileValues(*(float(x) for x in out))
    return out


def ambient_curvatures(profile: WarpedProfile, r) -> AmbientCurvatures:
    """Scalar curvature, radial Ricci and tangential sectional curvature.

    For ``V^-1 dr^2 + r^2 sigma`` the radial planes have sectional curvature
    ``-V'/(2r)`` and the tangential plane ``(1 - V)/r^2``.
    """
    V, dV, _ = profile_eval(profile, r)
    r = np.asarray(r, dtype=float)
    K12 = (1 - V) / r**2
    Rc_nn = -dV / r
    R = 2 * (1 - V) / r**2 - 2 * dV / r
    out = AmbientCurvatures(R, Rc_nn, K12)
    if np.ndim(R) == 0:
        return AmbientCurvatures(*(float(x) for x in out))
    return out


def tangential_ricci(profile, r):
    """Ricci curvature ``Rc(e, e)`` for a unit vector ``e`` tangent to the sphere."""
    V, dV, _ = profile_eval(profile, r)
    r = np.asarray(r, dtype=float)
    return -dV / (2 * r) + (1 - V) / r**2


def ambient_christoffels(profile: WarpedProfile, r, theta):
    """Christoffel table ``Gamma[k, i, j]`` in coordinates ``(r, theta, phi)``."""
    if theta <= 0 or theta >= np.pi:
        raise PoleSingularity("theta must lie strictly inside (0, pi)")
    V, dV, _ = profile_eval(profile, float(r))
    G = np.zeros((3, 3, 3))
    s, c = np.sin(theta), np.cos(theta)
    G[0, 0, 0] = -dV / (2 * V)
    G[0, 1, 1] = -r * V
    G[0, 2, 2] = -r * V * s**2
    G[1, 0, 1] = G[1, 1, 0] = 1 / r
    G[2, 0, 2] = G[2, 2, 0] = 1 / r
    G[1, 2, 2] = -s * c
    G[2, 1, 2] = G[2, 2, 1] = c / s
    return G


def round_sphere_data(profile: WarpedProfile, r) -> RoundSphere:
    """Umbilic data of the centered sphere of radius ``r``."""
    V, _, _ = profile_eval(profile, r)
    lam = np.sqrt(V) / r
    return RoundSphere(2 * lam, lam, 4 * np.pi * r**2)
