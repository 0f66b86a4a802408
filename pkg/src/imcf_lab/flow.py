"""Discretized IMCF foliations.

Two producers: the exact flow of centered spheres, ``r(t) = r0 e^{t/2}`` in
any warped product, and a method-of-lines solver for axisymmetric radial
graphs. For a graph the normal speed ``1/H`` means

    d rho / dt = |dr - rho' dtheta| / H = sqrt(V) * tilt / H,

integrated with classical RK4. Record nodes are ``t_k = k T / N_t``; the
integrator sub-steps between them to respect a diffusive step bound.

:func:`imcf_gauge` resamples a record onto coordinates that follow the
normal trajectories and make ``dmu = (|Sigma_t| / 4 pi) dsigma``. For
axisymmetric leaves these trajectories are the level sets of the
normalized cap area, which IMCF preserves.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from . import lattice, tensors
from ._fd import d_theta
from .ambient import WarpedProfile
from .errors import (FlowBreakdown, NoConvergence, NonGraphical,
                     RadiusOutOfDomain, StepTooLarge)
from .surface import AxisymGrid, SurfaceState, diameter, surface_geometry

AREA_TOL = {"exact": 1e-10, "pde": 1e-4}


@dataclass(eq=False)
class FlowRecord:
    """Leaves ``states[k]`` at times ``times[k]``."""

    profile: WarpedProfile
    grid: AxisymGrid
    times: np.ndarray
    states: list
    r0: float
    T: float
    provenance: str
    realized: dict = field(default_factory=dict)

    @property
    def n_t(self):
        return len(self.times) - 1

    @property
    def dt(self):
        return self.T / self.n_t if self.n_t else 0.0

    def field(self, name):
        """Stack a per-leaf array attribute into shape ``(N_t + 1, N_theta)``."""
        return np.array([getattr(s, name) for s in self.states])

    @property
    def H(self):
        return self.field("H")

    @property
    def rho(self):
        return self.field("rho")

    @property
    def areas(self):
        return np.array([s.area for s in self.states])

    def area_law_error(self):
        """Max relative deviation from ``|Sigma_t| = |Sigma_0| e^t``."""
        a = self.areas
        return float(np.max(np.abs(a / (a[0] * np.exp(self.times)) - 1)))

    @cached_property
    def gauge(self):
        return imcf_gauge(self)

    def save(self, out_dir, fields=("rho", "H", "E", "G", "A_tt", "A_pp")):
        """One CSV per field (rows t_k, columns theta_j) plus ``record.json``."""
        os.makedirs(out_dir, exist_ok=True)
        header = ["t"] + [f"{th:.17g}" for th in self.grid.theta]
        for name in fields:
            data = self.field(name)
            with open(os.path.join(out_dir, f"{name}.csv"), "w", newline="",
                      encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for t, row in zip(self.times, data):
                    w.writerow([f"{t:.17g}"] + [f"{x:.17g}" for x in row])
        meta = {
            "profile": {"kind": self.profile.kind, "m": self.profile.m},
            "r0": self.r0, "T": self.T, "N_t": self.n_t, "N_theta": self.grid.n,
            "provenance": self.provenance,
            "realized_bounds": _jsonable(self.realized),
        }
        with open(os.path.join(out_dir, "record.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _realized(record):
    H = record.H
    record.realized.update(H0=float(H.min()), H1=float(H.max()),
                           area_law_error=record.area_law_error())
    return record


def exact_round_flow(profile: WarpedProfile, r0, T, N_t, N_theta) -> FlowRecord:
    """Centered spheres ``r = r0 e^{t/2}`` sampled at ``N_t + 1`` times."""
    if not r0 > profile.r_min:
        raise RadiusOutOfDomain(f"r0={r0} not above r_min={profile.r_min}")
    grid = AxisymGrid(N_theta)
    times = np.linspace(0.0, T, N_t + 1)
    states = [surface_geometry(profile, np.full(N_theta, r0 * math.exp(t / 2)), grid)
              for t in times]
    return _realized(FlowRecord(profile, grid, times, states, float(r0), float(T), "exact"))


def _velocity(profile, rho, grid):
    try:
        st = surface_geometry(profile, rho, grid)
    except (NonGraphical, RadiusOutOfDomain) as exc:
        raise FlowBreakdown(str(exc)) from exc
    if not np.all(st.H > 0):
        raise FlowBreakdown(f"mean curvature reached {st.H.min():.3g} <= 0")
    return st.normal_speed_factor / st.H, st


def stable_step(state: SurfaceState):
    """Diffusive step bound ``0.25 min(H^2 E) dtheta^2``.

    Linearizing the speed gives ``d rho / dt ~ rho'' / (H^2 E)``.
    """
    dth = state.grid.dtheta
    return 0.25 * float(np.min(state.H**2 * state.E)) * dth**2


def _rk4(profile, rho, grid, dt):
    k1, _ = _velocity(profile, rho, grid)
    k2, _ = _velocity(profile, rho + 0.5 * dt * k1, grid)
    k3, _ = _velocity(profile, rho + 0.5 * dt * k2, grid)
    k4, _ = _velocity(profile, rho + dt * k3, grid)
    return rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def imcf_step(profile: WarpedProfile, state: SurfaceState, dt, area_guard=0.01):
    """One RK4 step from ``state``; returns the new radius samples."""
    if not np.all(state.H > 0):
        raise FlowBreakdown("mean curvature not positive")
    new = _rk4(profile, state.rho, state.grid, dt)
    try:
        new_area = surface_geometry(profile, new, state.grid).area
    except (NonGraphical, RadiusOutOfDomain) as exc:
        raise FlowBreakdown(str(exc)) from exc
    if abs(new_area / (state.area * math.exp(dt)) - 1) > area_guard:
        raise StepTooLarge(f"area grew by {new_area / state.area:.6g}, expected e^{dt:g}")
    return new


def _integrate(profile, rho0, grid, times, refine):
    states = [surface_geometry(profile, rho0, grid)]
    if not np.all(states[0].H > 0):
        raise FlowBreakdown("initial leaf has H <= 0")
    rho = states[0].rho
    for k in range(1, len(times)):
        span = times[k] - times[k - 1]
        n_sub = max(1, math.ceil(span / stable_step(states[-1]))) * refine
        h = span / n_sub
        for _ in range(n_sub):
            rho = _rk4(profile, rho, grid, h)
        _, st = _velocity(profile, rho, grid)
        states.append(st)
    return states


def run_imcf(profile: WarpedProfile, rho0, T, N_t, N_theta=None, max_halvings=3) -> FlowRecord:
    """Evolve the radial graph ``rho0`` by IMCF up to time ``T``.

    The area law is the acceptance test: on failure the internal step is
    halved, at most ``max_halvings`` times.
    """
    rho0 = np.asarray(rho0, dtype=float)
    grid = AxisymGrid(N_theta or rho0.size)
    times = np.linspace(0.0, T, N_t + 1)
    for level in range(max_halvings + 1):
        states = _integrate(profile, rho0, grid, times, 2**level)
        r0 = math.sqrt(states[0].area / (4 * math.pi))
        rec = FlowRecord(profile, grid, times, states, r0, float(T), "pde")
        if rec.area_law_error() <= AREA_TOL["pde"]:
            rec.realized["step_halvings"] = level
            return _realized(rec)
    raise NoConvergence(f"area law error {rec.area_law_error():.3g} after {max_halvings} halvings")


def perturbed_sphere(grid: AxisymGrid, r0=1.0, ell=2, eps=0.1):
    """``r0 (1 + eps P_ell(cos theta))``."""
    return r0 * (1 + eps * grid.legendre(ell))


def off_center_sphere(grid: AxisymGrid, radius, center):
    """Radial graph of the flat round sphere of given radius centered on the axis."""
    c = np.cos(grid.theta)
    s = np.sin(grid.theta)
    return center * c + np.sqrt(radius**2 - (center * s) ** 2)


# ---------------------------------------------------------------------------
# IMCF gauge


@dataclass(eq=False)
class GaugeFields:
    """Record fields resampled to IMCF-gauge coordinates ``(psi, t)``.

    All arrays have shape ``(N_t + 1, N_psi)`` and use the record's grid
    nodes as ``psi`` nodes. ``g_pp`` is the psi-psi metric entry and
    ``g_ff`` the phi-phi one; ``lam_p``/``lam_f`` the matching principal
    curvatures.
    """

    grid: AxisymGrid
    times: np.ndarray
    r0: float
    area: np.ndarray
    H: np.ndarray
    g_pp: np.ndarray
    g_ff: np.ndarray
    lam_p: np.ndarray
    lam_f: np.ndarray
    Rc_nn: np.ndarray
    R: np.ndarray
    K: np.ndarray
    theta_of_psi: np.ndarray

    @property
    def A_pp(self):
        return self.lam_p * self.g_pp

    @property
    def A_ff(self):
        return self.lam_f * self.g_ff

    @property
    def A_norm2(self):
        return self.lam_p**2 + self.lam_f**2

    def average(self, f):
        """Leaf averages ``(1/|Sigma_t|) int f dmu`` for samples ``f[k, j]``."""
        return np.asarray(f) @ self.grid.weights / (4 * np.pi)

    def integral(self, f):
        return self.average(f) * self.area


def _reflect_nodes(theta, f, parity=1):
    # two ghost nodes per pole for the spline
    th = np.concatenate([-theta[1::-1], theta, 2 * np.pi - theta[:-3:-1]])
    fv = np.concatenate([parity * f[1::-1], f, parity * f[:-3:-1]])
    return th, fv


def _leaf_to_gauge(state: SurfaceState):
    grid = state.grid
    band = state.area_element * grid.weights
    cap = np.concatenate([[0.0], np.cumsum(band)])
    frac = np.clip(cap / cap[-1], 0.0, 1.0)
    psi_edges = np.arccos(1 - 2 * frac)
    psi_edges[0], psi_edges[-1] = 0.0, np.pi
    theta_at = PchipInterpolator(psi_edges, grid.edges)(grid.theta)

    def resample(f):
        th, fv = _reflect_nodes(grid.theta, f)
        return CubicSpline(th, fv)(theta_at)

    E = resample(state.E)
    G = resample(state.G)
    # area preservation: 2 pi sqrt(EG) dtheta = (|Sigma|/2) sin psi dpsi
    dth_dpsi = state.area * np.sin(grid.theta) / (4 * np.pi * np.sqrt(E * G))
    return dict(
        H=resample(state.H), g_pp=E * dth_dpsi**2, g_ff=G,
        lam_p=resample(state.lam_t), lam_f=resample(state.lam_p),
        Rc_nn=resample(state.Rc_nn), R=resample(state.R), K=resample(state.K),
        theta_of_psi=theta_at,
    )


def imcf_gauge(record: FlowRecord) -> GaugeFields:
    """Resample a record to area-preserving normal-trajectory coordinates."""
    grid = record.grid
    if record.provenance == "exact":
        leaves = [dict(H=s.H, g_pp=s.E, g_ff=s.G, lam_p=s.lam_t, lam_f=s.lam_p,
                       Rc_nn=s.Rc_nn, R=s.R, K=s.K, theta_of_psi=grid.theta)
                  for s in record.states]
    else:
        leaves = [_leaf_to_gauge(s) for s in record.states]
    stack = {k: np.array([lf[k] for lf in leaves]) for k in leaves[0]}
    return GaugeFields(grid, record.times, record.r0, record.areas, **stack)


# ---------------------------------------------------------------------------
# class report


def _sigma_w22_density(gauge: GaugeFields, k):
    """``|A|^2 + |DA|^2 + |D^2 A|^2`` with sigma-covariant D and sigma norms."""
    grid = gauge.grid
    psi = grid.theta
    n = grid.n
    s, c = np.sin(psi), np.cos(psi)
    Gam = tensors.christoffels(np.ones(n), np.zeros(n), s**2, 2 * s * c)
    sinv = np.stack([np.ones(n), 1 / s**2], axis=1)
    A = np.zeros((n, 2, 2))
    A[:, 0, 0] = gauge.A_pp[k]
    A[:, 1, 1] = gauge.A_ff[k]
    DA = tensors.covariant_derivative(A, Gam, grid.dtheta)
    D2A = tensors.covariant_derivative(DA, Gam, grid.dtheta)
    return tensors.norm2(A, sinv) + tensors.norm2(DA, sinv) + tensors.norm2(D2A, sinv)


def scalar_w12_density(gauge: GaugeFields, f):
    """``f^2 + |d f|^2_delta`` on the lattice (time derivative along trajectories)."""
    from ._fd import d_time

    r0, t = gauge.r0, gauge.times
    ft = d_time(f, t[1] - t[0]) if len(t) >= 3 else np.zeros_like(f)
    fp = d_theta(np.asarray(f).T, gauge.grid.dtheta).T
    et = np.exp(t)[:, None]
    return f**2 + 4 / (r0**2 * et) * ft**2 + fp**2 / (r0**2 * et)


def class_membership_report(record: FlowRecord, bounds: dict) -> dict:
    """Realized class quantities against bounds ``{H0, H1, A1, D, C}``.

    ``A`` is measured leafwise in ``W^{2,2}`` (sigma-covariant derivatives,
    sigma norms, measure ``r0^2 e^t dsigma dt``); ``Rc(nu,nu)`` in
    ``W^{1,2}`` and ``R`` in ``L^2`` with respect to ``delta``.
    """
    gauge = record.gauge
    H = gauge.H
    w22 = np.array([_sigma_w22_density(gauge, k) for k in range(len(record.times))])
    A_w22 = math.sqrt(lattice.sigma_dt_integral(w22, record.times, record.grid, record.r0))
    Rc_w12 = math.sqrt(lattice.annulus_integral(scalar_w12_density(gauge, gauge.Rc_nn),
                                                record.times, record.grid, record.r0))
    R_l2 = math.sqrt(lattice.annulus_integral(gauge.R**2, record.times, record.grid, record.r0))
    diam = max(diameter(s) for s in record.states)
    K_final = float(np.max(np.abs(record.states[-1].K)))
    realized = dict(H_min=float(H.min()), H_max=float(H.max()), A_W22=A_w22,
                    Rc_nn_W12=Rc_w12, R_L2=R_l2, diameter=diam, K_final=K_final)
    checks = dict(
        H_in_range=bool(bounds["H0"] <= H.min() and H.max() <= bounds["H1"]),
        A_W22=bool(A_w22 <= bounds["A1"]),
        Rc_nn_W12=bool(Rc_w12 <= bounds["C"]),
        R_L2=bool(R_l2 <= bounds["C"]),
        diameter=bool(diam <= bounds["D"]),
        K_final=bool(K_final <= bounds["C"]),
    )
    record.realized.update(realized)
    return {"realized": realized, "bounds": dict(bounds), "checks": checks,
            "member": all(checks.values())}
