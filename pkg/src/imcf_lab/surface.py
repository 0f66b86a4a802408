"""Axisymmetric leaves written as radial graphs ``r = rho(theta)``.

The grid is pole-free and staggered, ``theta_j = (j + 1/2) * pi / N``. Each
node carries the exact area of its latitude band on the unit sphere as
quadrature weight, so integrals are midpoint rules in ``theta`` that are
exact for functions depending on ``theta`` only through the band area.
Derivatives are second-order centered differences with reflected ghosts
at the poles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from . import tensors
from ._fd import d2_theta, d_theta
from .ambient import WarpedProfile, ambient_curvatures, profile_eval, tangential_ricci
from .errors import GridMismatch, NonGraphical

TILT_CAP = 1e3


@dataclass(frozen=True)
class AxisymGrid:
    """Staggered colatitude grid with band-area weights."""

    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("need at least 4 colatitude nodes")

    @property
    def dtheta(self):
        return np.pi / self.n

    @cached_property
    def theta(self):
        return (np.arange(self.n) + 0.5) * self.dtheta

    @cached_property
    def edges(self):
        return np.arange(self.n + 1) * self.dtheta

    @cached_property
    def weights(self):
        # exact band areas: 2 pi (cos theta_{j-1/2} - cos theta_{j+1/2})
        return 4 * np.pi * np.sin(self.theta) * np.sin(self.dtheta / 2)

    def legendre(self, ell):
        """``P_ell(cos theta)`` sampled on the nodes."""
        from scipy.special import eval_legendre

        return eval_legendre(ell, np.cos(self.theta))


@dataclass(frozen=True, eq=False)
class SurfaceState:
    """Geometry of one leaf sampled on an :class:`AxisymGrid`.

    Metric components are in ``(theta, phi)``: ``g = E dtheta^2 + G dphi^2``.
    ``A_tt`` and ``A_pp`` are the diagonal second fundamental form entries,
    ``lam_t = A_tt / E`` and ``lam_p = A_pp / G`` the principal curvatures
    along the meridian and the parallel.
    """

    profile: WarpedProfile
    grid: AxisymGrid
    rho: np.ndarray
    drho: np.ndarray
    d2rho: np.ndarray
    V: np.ndarray
    dV: np.ndarray
    E: np.ndarray
    G: np.ndarray
    tilt: np.ndarray
    A_tt: np.ndarray
    A_pp: np.ndarray
    lam_t: np.ndarray
    lam_p: np.ndarray
    H: np.ndarray
    K: np.ndarray
    R: np.ndarray
    Rc_nn: np.ndarray
    K12: np.ndarray
    area_element: np.ndarray
    area: float

    @property
    def lam1(self):
        return np.minimum(self.lam_t, self.lam_p)

    @property
    def lam2(self):
        return np.maximum(self.lam_t, self.lam_p)

    @property
    def A_norm2(self):
        return self.lam_t**2 + self.lam_p**2

    @property
    def normal_speed_factor(self):
        """``|dr - rho' dtheta|`` = sqrt(V) * tilt; radial speed is this over H."""
        return np.sqrt(self.V) * self.tilt

    @property
    def E_inv(self):
        return 1.0 / self.E

    def metric_derivatives(self):
        """``(dE/dtheta, dG/dtheta)`` from the 2-jet of rho."""
        r, r1, r2 = self.rho, self.drho, self.d2rho
        s, c = np.sin(self.grid.theta), np.cos(self.grid.theta)
        dE = 2 * r1 * r2 / self.V - r1**3 * self.dV / self.V**2 + 2 * r * r1
        dG = 2 * r * s * (r1 * s + r * c)
        return dE, dG

    def christoffels(self):
        dE, dG = self.metric_derivatives()
        return tensors.christoffels(self.E, dE, self.G, dG)

    def second_fundamental_form(self):
        """``A`` as an ``(N, 2, 2)`` tensor array."""
        A = np.zeros((self.grid.n, 2, 2))
        A[:, 0, 0] = self.A_tt
        A[:, 1, 1] = self.A_pp
        return A

    def metric_tensor(self):
        g = np.zeros((self.grid.n, 2, 2))
        g[:, 0, 0] = self.E
        g[:, 1, 1] = self.G
        return g

    def ginv_diag(self):
        return np.stack([1 / self.E, 1 / self.G], axis=1)

    def to_csv(self, path):
        """Dump node samples as CSV."""
        cols = {
            "theta": self.grid.theta, "rho": self.rho, "H": self.H,
            "lambda1": self.lam1, "lambda2": self.lam2, "K": self.K,
            "Rc_nn": self.Rc_nn, "K12": self.K12, "area_element": self.area_element,
        }
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in zip(*cols.values()):
                w.writerow([f"{x:.17g}" for x in row])


def surface_geometry(profile: WarpedProfile, rho, grid: AxisymGrid | None = None,
                     tilt_cap=TILT_CAP) -> SurfaceState:
    """Build the :class:`SurfaceState` of the radial graph ``r = rho(theta)``.

    The unit normal is ``n^# / |n|`` for ``n = dr - rho' dtheta``; the second
    fundamental form is ``Hess(r - rho) / |n|`` restricted to the leaf, which
    equals ``-<D_{X_a} X_b, nu>`` with ``X_a = d_a + rho_a d_r``.
    """
    rho = np.asarray(rho, dtype=float)
    if grid is None:
        grid = AxisymGrid(rho.size)
    if rho.shape != (grid.n,):
        raise GridMismatch(f"rho has shape {rho.shape}, grid has {grid.n} nodes")
    th = grid.theta
    s, c = np.sin(th), np.cos(th)
    V, dV, _ = profile_eval(profile, rho)
    r1 = d_theta(rho, grid.dtheta)
    r2 = d2_theta(rho, grid.dtheta)

    tilt = np.sqrt(1 + r1**2 / (V * rho**2))
    if np.any(tilt > tilt_cap):
        raise NonGraphical(f"tilt factor {tilt.max():.3g} exceeds cap {tilt_cap}")
    nn = np.sqrt(V) * tilt

    E = r1**2 / V + rho**2
    G = (rho * s) ** 2
    A_tt = (-r2 + rho * V + 2 * r1**2 / rho + r1**2 * dV / (2 * V)) / nn
    A_pp = (rho * V * s**2 - r1 * s * c) / nn
    lam_t = A_tt / E
    lam_p = (rho * V - r1 * c / s) / (nn * rho**2)
    H = lam_t + lam_p

    # intrinsic curvature of E dtheta^2 + G dphi^2 from the 2-jet of rho
    dE = 2 * r1 * r2 / V - r1**3 * dV / V**2 + 2 * rho * r1
    sqE = np.sqrt(E)
    dsqG = r1 * s + rho * c
    d2sqG = r2 * s + 2 * r1 * c - rho * s
    K = -(d2sqG / sqE - dsqG * dE / (2 * E * sqE)) / (sqE * rho * s)

    R, Rc_rr, _ = ambient_curvatures(profile, rho)
    Rc_tan = tangential_ricci(profile, rho)
    # nu = (e_r - (rho'/rho)/sqrt(V) e_theta) / tilt in the orthonormal frame
    Rc_nn = (Rc_rr + (tilt**2 - 1) * Rc_tan) / tilt**2
    K12 = R / 2 - Rc_nn  # three dimensions: sec(nu^perp) = R/2 - Rc(nu, nu)

    area_element = sqE * rho  # sqrt(E G) / sin(theta)
    area = float(np.sum(area_element * grid.weights))
    return SurfaceState(profile, grid, rho, r1, r2, V, dV, E, G, tilt, A_tt, A_pp,
                        lam_t, lam_p, H, K, R, Rc_nn, K12, area_element, area)


def _check(state, f):
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (state.grid.n,):
        raise GridMismatch(f"samples of shape {f.shape} on a grid of {state.grid.n} nodes")
    return f


def surface_integral(state: SurfaceState, f) -> float:
    """``int_Sigma f dmu`` by the band midpoint rule."""
    f = _check(state, f)
    return float(np.sum(f * state.area_element * state.grid.weights))


def surface_average(state: SurfaceState, f) -> float:
    return surface_integral(state, f) / state.area


def gradient_theta(state, f):
    """Centered ``df/dtheta`` of an axisymmetric scalar."""
    return d_theta(_check(state, f), state.grid.dtheta)


def surface_operators(state: SurfaceState, f):
    """``(|grad f|^2, Laplacian f)`` for an axisymmetric scalar ``f``.

    The Laplacian is assembled in divergence form with zero flux through the
    poles, so its discrete integral telescopes to zero.
    """
    f = _check(state, f)
    dth = state.grid.dtheta
    df = d_theta(f, dth)
    grad2 = df**2 / state.E
    coef = np.sqrt(state.G / state.E)  # sqrt(det g) g^{theta theta}
    coef_edge = 0.5 * (coef[1:] + coef[:-1])
    flux = np.zeros(state.grid.n + 1)
    flux[1:-1] = coef_edge * (f[1:] - f[:-1]) / dth
    lap = (flux[1:] - flux[:-1]) / (dth * np.sqrt(state.E * state.G))
    return grad2, lap


def inner_gradient(state, f, h):
    """``g(grad f, grad h)`` for axisymmetric scalars."""
    dth = state.grid.dtheta
    return d_theta(_check(state, f), dth) * d_theta(_check(state, h), dth) / state.E


def diameter(state: SurfaceState, n_phi=16) -> float:
    """Upper estimate of the intrinsic diameter.

    Shortest paths on a lattice made of meridian polylines (through both
    poles) and parallel arcs, ``n_phi`` meridians. For a round sphere the
    pole-to-pole distance is exactly ``pi r``.
    """
    n = state.grid.n
    dth = state.grid.dtheta
    ds = np.sqrt(state.E) * dth  # meridian length element per node
    ring = np.sqrt(state.G) * (2 * np.pi / n_phi)

    def node(j, k):
        return 2 + j * n_phi + k

    rows, cols, vals = [], [], []

    def edge(a, b, w):
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((w, w))

    for k in range(n_phi):
        edge(0, node(0, k), 0.5 * ds[0])
        edge(1, node(n - 1, k), 0.5 * ds[-1])
        for j in range(n - 1):
            edge(node(j, k), node(j + 1, k), 0.5 * (ds[j] + ds[j + 1]))
        for j in range(n):
            edge(node(j, k), node(j, (k + 1) % n_phi), ring[j])
    size = 2 + n * n_phi
    graph = coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    # rotational symmetry: sources on one meridian (plus poles) suffice
    sources = [0, 1] + [node(j, 0) for j in range(n)]
    dist = dijkstra(graph, directed=False, indices=sources)
    return float(dist.max())
