"""Hawking masses and the integral identities they satisfy along IMCF.

Time derivatives of leaf integrals use the fourth-order stencils of
:func:`imcf_lab._fd.d_time`. Pointwise time derivatives are taken at fixed
IMCF-gauge coordinates (see :func:`imcf_lab.flow.imcf_gauge`), i.e. along
normal trajectories.

For reference, the evolution of the mean curvature under IMCF is

    dH/dt = -Lap(1/H) - (|A|^2 + Rc(nu, nu)) / H,

from which, integrating against ``dmu`` (which grows like ``e^t``),

    d/dt avg(H^2) = -2 avg(|grad H|^2 / H^2 + |A|^2 + Rc(nu, nu)).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import lattice, tensors
from ._fd import d_theta, d_time
from .errors import InterpolationDegenerate, NotEnoughTimeNodes, SupportViolation
from .flow import FlowRecord
from .surface import SurfaceState, surface_integral, surface_operators

FOUR_PI = 4 * math.pi
SIXTEEN_PI = 16 * math.pi
VARIANTS = ("euclidean", "hyperbolic")

# offsets applied to the leaf integrands in the hyperbolic setting
_HYP_SHIFT = {"R": 6.0, "Rc": 2.0, "K12": 1.0, "H2": -4.0, "A2": -2.0, "lam12": -1.0}


def _variant(variant):
    if variant not in VARIANTS:
        raise ValueError(f"mass variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def mass_integrand(H, variant="euclidean"):
    """``H^2`` or ``H^2 - 4``."""
    return H**2 - (4.0 if _variant(variant) == "hyperbolic" else 0.0)


def hawking_mass(state: SurfaceState, variant="euclidean") -> float:
    """``sqrt(|Sigma| / (16 pi)^3) (16 pi - int mass_integrand dmu)``."""
    w = surface_integral(state, mass_integrand(state.H, variant))
    return math.sqrt(state.area / SIXTEEN_PI**3) * (SIXTEEN_PI - w)


def mass_history(record: FlowRecord, variant="euclidean"):
    return np.array([hawking_mass(s, variant) for s in record.states])


@dataclass
class Table:
    """Named columns over the record's time nodes."""

    tag: str
    columns: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.columns[key]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"identity={self.tag}"])
            w.writerow(list(self.columns))
            for row in zip(*self.columns.values()):
                w.writerow([f"{float(x):.17g}" for x in row])


class IdentityResidualTable(Table):
    """Rows ``{t, lhs, rhs, residual, tolerance}`` plus extra diagnostics."""

    def __init__(self, tag, t, lhs, rhs, tolerance, **extra):
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        cols = {"t": np.asarray(t, dtype=float), "lhs": lhs, "rhs": rhs,
                "residual": lhs - rhs,
                "tolerance": np.broadcast_to(np.asarray(tolerance, dtype=float), lhs.shape)}
        cols.update({k: np.asarray(v, dtype=float) for k, v in extra.items()})
        super().__init__(tag, cols)

    @property
    def residual(self):
        return self.columns["residual"]

    def max_abs_residual(self):
        return float(np.max(np.abs(self.residual)))


def _need_nodes(record, n=3):
    if len(record.times) < n:
        raise NotEnoughTimeNodes(f"need >= {n} time nodes, record has {len(record.times)}")


def _exact_tol(record, tol):
    return tol if record.provenance == "exact" else np.nan


def geroch_diagnostics(record: FlowRecord, variant="euclidean") -> IdentityResidualTable:
    """``d/dt int H^2`` against ``(16pi)^{3/2} |Sigma|^{-1/2} (m/2 - dm/dt)``.

    Extra columns give the two limiting values of ``d/dt int H^2``: zero
    (vanishing mass) and ``(16 pi / r0) m e^{-t/2}`` with ``m = m_H(Sigma_0)``.
    """
    _need_nodes(record)
    t, dt = record.times, record.dt
    W = np.array([surface_integral(s, mass_integrand(s.H, variant)) for s in record.states])
    m = mass_history(record, variant)
    lhs = d_time(W, dt)
    rhs = SIXTEEN_PI**1.5 / np.sqrt(record.areas) * (0.5 * m - d_time(m, dt))
    return IdentityResidualTable(
        "geroch_area_derivative", t, lhs, rhs, _exact_tol(record, 1e-8),
        mass=m, limit_zero_mass=np.zeros_like(t),
        limit_positive_mass=SIXTEEN_PI / record.r0 * m[0] * np.exp(-t / 2),
    )


def corollary_integral_table(record: FlowRecord, variant="euclidean") -> Table:
    """Leaf integrals whose limits characterize the model leaves.

    Columns ``grad_H, umbilic, R, Rc, K12, H2, A2, lam12, chi`` are
    ``int |grad H|^2/H^2``, ``int (lam1 - lam2)^2``, ``int R``,
    ``int Rc(nu,nu)``, ``int K12``, ``int mass_integrand``, ``int |A|^2``,
    ``int lam1 lam2`` and ``int K / 2pi``, shifted in the hyperbolic variant
    by ``+6, +2, +1, -4, -2, -1``. The ``*_limit`` columns hold the
    positive-mass limits with ``m = m_H(Sigma_0)``; for ``K12`` both the
    closed-form value of the model and the opposite-sign value are given.
    """
    variant = _variant(variant)
    shift = _HYP_SHIFT if variant == "hyperbolic" else dict.fromkeys(_HYP_SHIFT, 0.0)
    cols = {k: [] for k in ("grad_H", "umbilic", "R", "Rc", "K12", "H2", "A2", "lam12", "chi")}
    for s in record.states:
        grad2, _ = surface_operators(s, s.H)
        I = lambda f: surface_integral(s, f)  # noqa: E731
        cols["grad_H"].append(I(grad2 / s.H**2))
        cols["umbilic"].append(I((s.lam1 - s.lam2) ** 2))
        cols["R"].append(I(s.R + shift["R"]))
        cols["Rc"].append(I(s.Rc_nn + shift["Rc"]))
        cols["K12"].append(I(s.K12 + shift["K12"]))
        cols["H2"].append(I(s.H**2 + shift["H2"]))
        cols["A2"].append(I(s.A_norm2 + shift["A2"]))
        cols["lam12"].append(I(s.lam1 * s.lam2 + shift["lam12"]))
        cols["chi"].append(I(s.K) / (2 * math.pi))
    t = record.times
    m0 = hawking_mass(record.states[0], variant)
    decay = 1 - math.sqrt(SIXTEEN_PI / record.areas[0]) * m0 * np.exp(-t / 2)
    k12_model = 8 * math.pi / record.r0 * m0 * np.exp(-t / 2)
    out = {"t": t}
    out.update({k: np.array(v) for k, v in cols.items()})
    out.update(
        H2_limit=SIXTEEN_PI * decay, A2_limit=8 * math.pi * decay,
        lam12_limit=FOUR_PI * decay, Rc_limit=-k12_model,
        K12_limit=k12_model, K12_limit_negated=-k12_model,
    )
    return Table(f"model_leaf_integrals_{variant}", out)


def mean_curvature_averages(record: FlowRecord):
    """``(avg H, avg H^2)`` per leaf."""
    Hbar = np.array([surface_integral(s, s.H) / s.area for s in record.states])
    H2bar = np.array([surface_integral(s, s.H**2) / s.area for s in record.states])
    return Hbar, H2bar


def average_evolution_residuals(record: FlowRecord, variant="euclidean") -> dict:
    """Three residual tables for the evolution of the averages of H and H^2.

    ``average_time_derivative``: ``d avg(H)/dt`` vs ``avg(dH/dt)``.
    ``average_mean_curvature``: ``d avg(H)/dt`` vs ``-avg((|A|^2 + Rc)/H)``.
    ``average_squared``: ``d avg(H^2)/dt`` vs
    ``-2 avg(|grad H|^2/H^2 + |A|^2 + Rc)``; the column ``rhs_coef2`` doubles
    the gradient term and ``residual_coef2`` is its residual.

    Limit columns: vanishing-mass and positive-mass values of both
    derivatives with ``m = m_H(Sigma_0)`` in the given mass variant.
    """
    _need_nodes(record)
    t, dt, r0 = record.times, record.dt, record.r0
    gauge = record.gauge
    Hbar, H2bar = mean_curvature_averages(record)
    dHbar = d_time(Hbar, dt)
    dH2bar = d_time(H2bar, dt)
    tol = _exact_tol(record, 1e-6)

    rhs_prop = gauge.average(d_time(gauge.H, dt))
    rhs_evol, rhs_sq, grad_term = [], [], []
    for s in record.states:
        grad2, _ = surface_operators(s, s.H)
        avg = lambda f: surface_integral(s, f) / s.area  # noqa: E731
        rhs_evol.append(-avg((s.A_norm2 + s.Rc_nn) / s.H))
        rhs_sq.append(-2 * avg(grad2 / s.H**2 + s.A_norm2 + s.Rc_nn))
        grad_term.append(avg(grad2 / s.H**2))
    rhs_sq = np.array(rhs_sq)
    rhs_coef2 = rhs_sq - 2 * np.array(grad_term)

    m = mass_history(record, variant)[0]
    bracket = 1 - 2 * m / r0 * np.exp(-t / 2)
    limits = dict(
        limit_zero_mass_dH2=-4 / r0**2 * np.exp(-t),
        limit_mass_dH2=-4 / r0**2 * bracket * np.exp(-t),
        limit_zero_mass_dH=-np.exp(-t / 2) / r0,
        limit_mass_dH=-np.sqrt(np.clip(bracket, 0, None)) * np.exp(-t / 2) / r0,
    )
    return {
        "average_time_derivative": IdentityResidualTable(
            "average_time_derivative", t, dHbar, rhs_prop, tol),
        "average_mean_curvature": IdentityResidualTable(
            "average_mean_curvature", t, dHbar, rhs_evol, tol, **limits),
        "average_squared": IdentityResidualTable(
            "average_squared", t, dH2bar, rhs_sq, tol, rhs_coef2=rhs_coef2,
            residual_coef2=dH2bar - rhs_coef2, **limits),
    }


# ---------------------------------------------------------------------------
# leaf calculus in gauge coordinates


def _leaf_gradients(gauge, f):
    """``d f / dpsi`` for samples ``f[k, j]``."""
    return d_theta(np.asarray(f).T, gauge.grid.dtheta).T


def _leaf_laplacian(gauge, f):
    """Divergence-form Laplacian of ``f[k, j]`` on each gauge leaf."""
    dth = gauge.grid.dtheta
    E, G = gauge.g_pp, gauge.g_ff
    coef = np.sqrt(G / E)
    coef_edge = 0.5 * (coef[:, 1:] + coef[:, :-1])
    flux = np.zeros((f.shape[0], f.shape[1] + 1))
    flux[:, 1:-1] = coef_edge * (f[:, 1:] - f[:, :-1]) / dth
    return (flux[:, 1:] - flux[:, :-1]) / (dth * np.sqrt(E * G))


def _leaf_frame(gauge, k):
    dth = gauge.grid.dtheta
    E, G = gauge.g_pp[k], gauge.g_ff[k]
    return E, G, tensors.frame_connection(E, G, d_theta(G, dth))


def _leaf_hessian_norm2(gauge, f):
    out = np.empty_like(f)
    dth = gauge.grid.dtheta
    for k in range(f.shape[0]):
        E, G, W = _leaf_frame(gauge, k)
        df = np.zeros((gauge.grid.n, 2))
        df[:, 0] = d_theta(f[k], dth) / np.sqrt(E)
        hess = tensors.frame_covariant_derivative(df, E, W, dth)
        out[k] = np.sum(hess**2, axis=(1, 2))
    return out


@dataclass
class WeakRicciResult:
    lhs: float
    rhs: float
    residual: float
    rhs_as_printed: float
    residual_as_printed: float


def weak_ricci_residual(record: FlowRecord, phi, a, b, phi_t=None) -> WeakRicciResult:
    """Space-time weak form of the ``H^2`` evolution tested against ``phi``.

    ``phi[k, j]`` is sampled on the IMCF-gauge lattice and must vanish on
    the first and last two nodes of ``[a, b]``. The identity checked is

        int_a^b int 2 phi Rc dmu dt = int_{S_a} phi H^2 - int_{S_b} phi H^2
            + int_a^b int [phi_t H^2 + phi (H^2 - 2|A|^2)
                           - 2 g(grad phi, grad H)/H - 2 phi |grad H|^2/H^2]

    ``rhs_as_printed`` drops the ``phi_t H^2`` term and flips the sign of the
    last term, for comparison.
    """
    t = record.times
    ia = int(np.argmin(np.abs(t - a)))
    ib = int(np.argmin(np.abs(t - b)))
    if abs(t[ia] - a) > 1e-9 or abs(t[ib] - b) > 1e-9 or ib - ia < 4:
        raise ValueError("a and b must be record time nodes at least 4 steps apart")
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (len(t), record.grid.n):
        raise ValueError(f"phi must have shape {(len(t), record.grid.n)}")
    if not np.any(phi):
        return WeakRicciResult(0.0, 0.0, 0.0, 0.0, 0.0)
    sl = slice(ia, ib + 1)
    ends = np.r_[ia, ia + 1, ib - 1, ib]
    if np.any(phi[ends] != 0):
        raise SupportViolation("phi must vanish on the first and last two nodes of [a, b]")
    g = record.gauge
    phi_t = d_time(phi, record.dt) if phi_t is None else np.asarray(phi_t, dtype=float)
    H, A2, Rc = g.H, g.A_norm2, g.Rc_nn
    dH = _leaf_gradients(g, H)
    dphi = _leaf_gradients(g, phi)
    grad_H2 = dH**2 / g.g_pp
    dphi_dH = dphi * dH / g.g_pp

    def st(f):
        return float(lattice.time_integral(g.integral(f)[sl], t[sl]))

    lhs = st(2 * phi * Rc)
    boundary = g.integral(phi * H**2)
    bnd = boundary[ia] - boundary[ib]
    common = phi * (H**2 - 2 * A2) - 2 * dphi_dH / H
    rhs = bnd + st(phi_t * H**2 + common - 2 * phi * grad_H2 / H**2)
    printed = bnd + st(common + 2 * phi * grad_H2 / H**2)
    return WeakRicciResult(lhs, rhs, abs(lhs - rhs), printed, abs(lhs - printed))


def ricci_inequality_margin(record: FlowRecord) -> dict:
    """LHS minus RHS of the space-time ``H^2`` energy inequality.

    ``laplacian``: ``int int 4 Rc^2 + 8|A|^2|Rc| + 4|A|^4 + int_{S_0}
    |grad H|^2/H^2`` minus ``int int (d_t H^2)^2 + (Lap H^2)^2 / H^4 +
    sup_t int |grad H|^2/H^2``. ``hessian`` replaces the Laplacian term by
    ``|Hess H^2|^2 / H1^4`` and adds ``|K| |grad H^2|^2 / H1^4`` (leaf Ricci
    curvature) to the left side; ``hessian_H0`` uses ``H0^4`` on the right.
    """
    if len(record.times) < 3:
        raise NotEnoughTimeNodes("margin needs at least 3 time nodes")
    g = record.gauge
    t = record.times
    H, A2, Rc = g.H, g.A_norm2, g.Rc_nn
    H2 = H**2
    H0, H1 = float(H.min()), float(H.max())
    dtH2 = d_time(H2, record.dt)
    lapH2 = _leaf_laplacian(g, H2)
    gradH2sq = _leaf_gradients(g, H2) ** 2 / g.g_pp
    hessH2 = _leaf_hessian_norm2(g, H2)
    gH = _leaf_gradients(g, H) ** 2 / g.g_pp / H2
    grad_int = g.integral(gH)

    def st(f):
        return float(lattice.time_integral(g.integral(f), t))

    base = st(4 * Rc**2 + 8 * A2 * np.abs(Rc) + 4 * A2**2) + grad_int[0]
    sup = float(grad_int.max())
    lap_margin = base - (st(dtH2**2 + lapH2**2 / H2**2) + sup)
    curv = st(np.abs(g.K) * gradH2sq / H1**4)
    hess_margin = base + curv - (st(dtH2**2 + hessH2 / H1**4) + sup)
    hess_margin_H0 = base + curv - (st(dtH2**2 + hessH2 / H0**4) + sup)
    return {"laplacian": lap_margin, "hessian": hess_margin, "hessian_H0": hess_margin_H0}


def interpolation_ratio(state: SurfaceState, T) -> float:
    """``int |grad T|^2 / (sqrt(int |grad^2 T|^2) sqrt(int |T|^2))``.

    ``T`` is an ``(N, 2, 2)`` covariant tensor in ``(theta, phi)``.
    Derivatives are covariant for the induced metric and are taken on the
    orthonormal-frame components, which stay regular at the poles.
    """
    T = np.asarray(T, dtype=float)
    dth = state.grid.dtheta
    W = tensors.frame_connection(state.E, state.G, d_theta(state.G, dth))
    Tf = tensors.to_frame(T, state.E, state.G)
    dT = tensors.frame_covariant_derivative(Tf, state.E, W, dth)
    d2T = tensors.frame_covariant_derivative(dT, state.E, W, dth)

    def energy(x):
        return surface_integral(state, np.sum(x**2, axis=tuple(range(1, x.ndim))))

    n0, n1, n2 = energy(Tf), energy(dT), energy(d2T)
    tiny = 1e-24 * max(n0, 1e-300)
    if n2 <= tiny:
        if n1 <= tiny:
            return 0.0
        raise InterpolationDegenerate("second derivative vanishes but the first does not")
    return n1 / (math.sqrt(n2) * math.sqrt(n0))


def second_ff_gradient_decay(record: FlowRecord, C=1.0, A2_bound=1.0) -> Table:
    """Per leaf ``int |grad A|^2 dmu`` and the interpolation bound

    ``C sqrt(A2_bound) (int 2 max_j |lam_j - e^{-t/2}/r0|^2 dmu)^{1/2}``.
    """
    g = record.gauge
    dth = g.grid.dtheta
    t = record.times
    grad_A, dev = [], []
    for k in range(len(t)):
        E, _, W = _leaf_frame(g, k)
        A = np.zeros((g.grid.n, 2, 2))
        A[:, 0, 0] = g.lam_p[k]
        A[:, 1, 1] = g.lam_f[k]
        DA = tensors.frame_covariant_derivative(A, E, W, dth)
        grad_A.append(float(np.sum(DA**2, axis=(1, 2, 3)) @ g.grid.weights / FOUR_PI * g.area[k]))
        target = math.exp(-t[k] / 2) / record.r0
        worst = np.maximum((g.lam_p[k] - target) ** 2, (g.lam_f[k] - target) ** 2)
        dev.append(float(2 * worst @ g.grid.weights / FOUR_PI * g.area[k]))
    bound = C * math.sqrt(A2_bound) * np.sqrt(np.array(dev))
    return Table("second_fundamental_form_gradient",
                 {"t": t, "grad_A": np.array(grad_A), "bound": bound})


def mass_bracket(record: FlowRecord, variant="euclidean") -> Table:
    """Bounds on ``int mass_integrand`` from the range of the Hawking mass."""
    m = mass_history(record, variant)
    m1, m2 = float(m.min()), float(m.max())
    t = record.times
    c = math.sqrt(SIXTEEN_PI / record.areas[0]) * np.exp(-t / 2)
    W = np.array([surface_integral(s, mass_integrand(s.H, variant)) for s in record.states])
    return Table("mass_bracket", {"t": t, "lower": SIXTEEN_PI * (1 - c * m2), "value": W,
                                  "upper": SIXTEEN_PI * (1 - c * m1)})


def band_limited_tensor(state: SurfaceState, f_coef, h_coef) -> np.ndarray:
    """``f g + (Hess h)^0`` with ``f, h`` Legendre series in ``cos theta``.

    ``(.)^0`` is the trace-free part. Returns an ``(N, 2, 2)`` covariant
    tensor, the test fields of :func:`interpolation_ratio`.
    """
    from numpy.polynomial.legendre import legval

    x = np.cos(state.grid.theta)
    f, h = legval(x, f_coef), legval(x, h_coef)
    dth = state.grid.dtheta
    E, G = state.E, state.G
    W = tensors.frame_connection(E, G, d_theta(G, dth))
    dh = np.zeros((state.grid.n, 2))
    dh[:, 0] = d_theta(h, dth) / np.sqrt(E)
    hess = tensors.frame_covariant_derivative(dh, E, W, dth)
    hess = 0.5 * (hess + hess.transpose(0, 2, 1))
    trace = hess[:, 0, 0] + hess[:, 1, 1]
    frame = f[:, None, None] * np.eye(2) + hess - 0.5 * trace[:, None, None] * np.eye(2)
    # back to coordinate components
    scale = np.stack([np.sqrt(E), np.sqrt(G)], axis=1)
    return frame * scale[:, :, None] * scale[:, None, :]
