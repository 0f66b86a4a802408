"""Annulus metrics on ``Sigma x [0, T]`` and their Sobolev distances.

Every metric here is block diagonal in IMCF gauge, ``N^2 dt^2 + g``, with an
axisymmetric diagonal leaf metric ``g = g_pp dpsi^2 + g_ff dphi^2``. The
chain interpolating between a flow and its model annulus is

    ghat = H^-2 dt^2 + g(t)
    g1   = Hbar(t)^-2 dt^2 + g(t)
    g2   = Hbar(t)^-2 dt^2 + e^{t-T} g(T)
    g3   = N_model(t)^2 dt^2 + e^{t-T} g(T)

where ``Hbar`` is the leaf average of ``H`` and ``N_model`` the lapse of the
model annulus for the chosen case. Distances are measured against the flat
gauge metric ``delta`` (see :mod:`imcf_lab.lattice`).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import lattice
from ._fd import d_theta, d_time
from .errors import (CaseMassMismatch, FamilyTooSmall, GridMismatch, LapseSingular,
                     ParameterNotDecreasing)
from .flow import FlowRecord
from .masses import hawking_mass, mean_curvature_averages
from .surface import AxisymGrid

CASES = ("pmt-flat", "rpi-schwarzschild", "pmt-hyperbolic", "rpi-adss")
STAGES = ("ghat", "g1", "g2", "g3")
MODES = ("delta-covariant", "coordinate-partial")
_CASE_PROFILE = {"pmt-flat": "flat", "rpi-schwarzschild": "schwarzschild",
                 "pmt-hyperbolic": "hyperbolic", "rpi-adss": "adss"}
_PROTOTYPE_TAG = {"pmt-flat": "prototype-delta", "rpi-schwarzschild": "prototype-gS",
                  "pmt-hyperbolic": "prototype-gH", "rpi-adss": "prototype-gAdSS"}


@dataclass(eq=False)
class AnnulusMetric:
    """``N2 dt^2 + g_pp dpsi^2 + g_ff dphi^2`` sampled as ``[k, j]`` arrays."""

    grid: AxisymGrid
    times: np.ndarray
    r0: float
    N2: np.ndarray
    g_pp: np.ndarray
    g_ff: np.ndarray
    tag: str

    def components(self):
        """Diagonal ``(tt, psi psi, phi phi)`` stacked on the last axis."""
        return np.stack([self.N2, self.g_pp, self.g_ff], axis=-1)

    def volume(self):
        """``int sqrt(det h) dpsi dphi dt``."""
        dens = np.sqrt(self.N2 * self.g_pp * self.g_ff) / np.sin(self.grid.theta)
        return float(lattice.time_integral(dens @ self.grid.weights, self.times))


def _check_case(case, m):
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}, got {case!r}")
    if case.startswith("pmt") and m != 0:
        raise CaseMassMismatch(f"{case} takes m = 0, got {m}")
    if case.startswith("rpi") and not m > 0:
        raise CaseMassMismatch(f"{case} needs m > 0, got {m}")


def model_lapse2(case, r0, m, times):
    """``N^2(t)`` of the model annulus of ``case`` with inner radius ``r0``."""
    _check_case(case, m)
    t = np.asarray(times, dtype=float)
    if case == "pmt-flat":
        return 0.25 * r0**2 * np.exp(t)
    if case == "rpi-schwarzschild":
        bracket = 1 - 2 * m / r0 * np.exp(-t / 2)
        scale = 0.25 * r0**2 * np.exp(t)
    elif case == "pmt-hyperbolic":
        bracket = 1 + np.exp(-t) / r0**2
        scale = 0.25
    else:
        bracket = 1 + np.exp(-t) / r0**2 - 2 * m / r0**3 * np.exp(-1.5 * t)
        scale = 0.25
    if np.any(bracket <= 0):
        raise LapseSingular(f"lapse bracket reaches {bracket.min():.3g} <= 0 for {case}, m={m}")
    return scale / bracket


def prototype_metric(case, r0, m, T=None, grid=None, times=None) -> AnnulusMetric:
    """Model annulus ``N_model^2 dt^2 + r0^2 e^t sigma`` on a lattice.

    Either ``times`` or ``T`` (with 257 uniform nodes) fixes the time axis.
    """
    if times is None:
        times = np.linspace(0.0, T, 257)
    times = np.asarray(times, dtype=float)
    grid = grid or AxisymGrid(64)
    N2 = np.repeat(model_lapse2(case, r0, m, times)[:, None], grid.n, axis=1)
    leaf = r0**2 * np.exp(times)[:, None] * np.ones(grid.n)
    return AnnulusMetric(grid, times, r0, N2, leaf, leaf * np.sin(grid.theta) ** 2,
                         _PROTOTYPE_TAG[case])


def chain_metric(record: FlowRecord, stage, case="pmt-flat", m=0.0, g3_base="T") -> AnnulusMetric:
    """Stage ``ghat``, ``g1``, ``g2`` or ``g3`` of the chain for ``record``.

    ``g3_base="0"`` uses ``e^t g(0)`` as the leaf part of ``g3`` instead of
    ``e^{t-T} g(T)``.
    """
    if stage not in STAGES:
        raise ValueError(f"stage must be one of {STAGES}, got {stage!r}")
    _check_case(case, m)
    gauge = record.gauge
    t = record.times
    n = record.grid.n
    if stage == "ghat":
        return AnnulusMetric(record.grid, t, record.r0, 1 / gauge.H**2, gauge.g_pp, gauge.g_ff, stage)
    Hbar, _ = mean_curvature_averages(record)
    lapse = np.repeat((1 / Hbar**2)[:, None], n, axis=1)
    if stage == "g1":
        return AnnulusMetric(record.grid, t, record.r0, lapse, gauge.g_pp, gauge.g_ff, stage)
    if stage == "g3" and g3_base == "0":
        grow = np.exp(t)[:, None]
        g_pp, g_ff = grow * gauge.g_pp[0], grow * gauge.g_ff[0]
    else:
        grow = np.exp(t - record.T)[:, None]
        g_pp, g_ff = grow * gauge.g_pp[-1], grow * gauge.g_ff[-1]
    if stage == "g3":
        lapse = np.repeat(model_lapse2(case, record.r0, m, t)[:, None], n, axis=1)
    return AnnulusMetric(record.grid, t, record.r0, lapse, g_pp, g_ff, stage)


def _same_lattice(h1, h2):
    if (h1.grid.n != h2.grid.n or h1.times.shape != h2.times.shape
            or not np.allclose(h1.times, h2.times, rtol=0, atol=1e-12)
            or not math.isclose(h1.r0, h2.r0, rel_tol=1e-12)):
        raise GridMismatch(f"lattices differ: {h1.tag} vs {h2.tag}")


def _gradient(d, times, grid, mode):
    """``nabla_k d_ij`` of a diagonal ``(k, j, 3)`` field; shape ``(k, j, 3, 3, 3)``."""
    nt, n, _ = d.shape
    full = np.zeros((nt, n, 3, 3))
    for i in range(3):
        full[..., i, i] = d[..., i]
    out = np.zeros((nt, n, 3, 3, 3))
    if nt >= 3:
        out[:, :, 0] = d_time(full, times[1] - times[0])
    out[:, :, 1] = np.moveaxis(d_theta(np.moveaxis(full, 1, 0), grid.dtheta), 0, 1)
    if mode == "delta-covariant":
        Gam = lattice.delta_christoffels(grid.theta)  # Gam[j, l, k, i] = Gamma^l_{ki}
        out -= np.einsum("jlki,tjlm->tjkim", Gam, full)
        out -= np.einsum("jlkm,tjil->tjkim", Gam, full)
    return out


def sobolev_distance(h1: AnnulusMetric, h2: AnnulusMetric, order="W12",
                     derivative_mode="delta-covariant", squared=False) -> float:
    """``L2`` or ``W12`` distance with indices raised by ``delta``.

    ``W12`` adds ``sum_k int |d_k (h1 - h2)|^2_delta dV_delta`` where the
    derivative index is raised by ``delta`` as well. Returns the square root
    unless ``squared``.
    """
    if order not in ("L2", "W12"):
        raise ValueError(f"order must be L2 or W12, got {order!r}")
    if derivative_mode not in MODES:
        raise ValueError(f"derivative_mode must be one of {MODES}, got {derivative_mode!r}")
    _same_lattice(h1, h2)
    grid, t, r0 = h1.grid, h1.times, h1.r0
    inv = 1 / lattice.delta_diagonal(r0, t, grid.theta)
    d = h1.components() - h2.components()
    dens = np.sum((d * inv) ** 2, axis=-1)
    if order == "W12":
        grad = _gradient(d, t, grid, derivative_mode)
        w = inv[..., :, None, None] * inv[..., None, :, None] * inv[..., None, None, :]
        dens = dens + np.sum(w * grad**2, axis=(-3, -2, -1))
    val = max(lattice.annulus_integral(dens, t, grid, r0), 0.0)
    return val if squared else math.sqrt(val)


@dataclass
class SandwichMargins:
    lower: float
    upper: float
    lower_as_printed: float
    upper_as_printed: float


def metric_sandwich_margin(record: FlowRecord) -> SandwichMargins:
    """Margins of ``e^{-int_t^T 2 lam2/H} g(T) <= g(t) <= e^{-int_t^T 2 lam1/H} g(T)``.

    Each margin is the smallest eigenvalue, relative to ``g(T)``, of the
    difference between the two sides, minimized over the lattice. The
    ``*_as_printed`` pair uses ``lam1`` in the lower exponent and ``lam2`` in
    the upper one with the opposite orientation of the time integral.
    """
    t = record.times
    if len(t) < 2:
        return SandwichMargins(0.0, 0.0, 0.0, 0.0)
    g = record.gauge
    lam1 = np.minimum(g.lam_p, g.lam_f)
    lam2 = np.maximum(g.lam_p, g.lam_f)

    def tail(f):
        # int_t^T f ds for every node t (Simpson on [t, T] where possible)
        out = np.zeros_like(f)
        for k in range(len(t) - 1):
            out[k] = lattice.time_integral(f[k:], t[k:]) if len(t) - k >= 3 else \
                0.5 * (f[k] + f[k + 1]) * (t[k + 1] - t[k])
        return out

    I1, I2 = tail(2 * lam1 / g.H), tail(2 * lam2 / g.H)
    ratio = np.stack([g.g_pp / g.g_pp[-1], g.g_ff / g.g_ff[-1]], axis=-1)
    lower = float(np.min(ratio - np.exp(-I2)[..., None]))
    upper = float(np.min(np.exp(-I1)[..., None] - ratio))
    low_p = float(np.min(ratio - np.exp(I1)[..., None]))
    up_p = float(np.min(np.exp(I2)[..., None] - ratio))
    return SandwichMargins(lower, upper, low_p, up_p)


def metric_evolution_residual(record: FlowRecord):
    """Max of ``|dg/dt - c A / H|`` relative to ``|g|`` for ``c = 2`` and ``c = 1``."""
    g = record.gauge
    dt = record.dt
    out = {}
    for c in (2, 1):
        r_pp = np.abs(d_time(g.g_pp, dt) - c * g.A_pp / g.H) / g.g_pp
        r_ff = np.abs(d_time(g.g_ff, dt) - c * g.A_ff / g.H) / g.g_ff
        out[f"factor_{c}"] = float(max(r_pp.max(), r_ff.max()))
    return out


@dataclass
class ChainReport:
    case: str
    m: float
    mode: str
    links: list
    triangle_total: dict
    direct: dict
    direct_squared: dict
    vol_rel_err: float
    mode_gap: float
    consistent: bool
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["link", "l2", "w12", "mode"])
            for row in self.links:
                w.writerow([row["link"], f"{row['l2']:.17g}", f"{row['w12']:.17g}", self.mode])
            w.writerow(["direct", f"{self.direct['l2']:.17g}", f"{self.direct['w12']:.17g}", self.mode])
            w.writerow(["triangle_total", f"{self.triangle_total['l2']:.17g}",
                        f"{self.triangle_total['w12']:.17g}", self.mode])


def chain_report(record: FlowRecord, case="pmt-flat", m=0.0, mode="delta-covariant",
                 g3_base="T") -> ChainReport:
    """Link distances along ``ghat -> g1 -> g2 -> g3 -> prototype``."""
    _check_case(case, m)
    stages = [chain_metric(record, s, case, m, g3_base) for s in STAGES]
    proto = prototype_metric(case, record.r0, m, grid=record.grid, times=record.times)
    chain = stages + [proto]
    links = []
    for a, b in zip(chain[:-1], chain[1:]):
        links.append({"link": f"{a.tag}-{b.tag}",
                      "l2": sobolev_distance(a, b, "L2", mode),
                      "w12": sobolev_distance(a, b, "W12", mode)})
    direct = {o: sobolev_distance(chain[0], proto, o.upper(), mode) for o in ("l2", "w12")}
    direct_sq = {o: sobolev_distance(chain[0], proto, o.upper(), mode, squared=True)
                 for o in ("l2", "w12")}
    other = MODES[1 - MODES.index(mode)]
    gap = abs(direct["w12"] - sobolev_distance(chain[0], proto, "W12", other))
    vol = proto.volume()
    return ChainReport(
        case=case, m=float(m), mode=mode, links=links,
        triangle_total={o: float(sum(lk[o] for lk in links)) for o in ("l2", "w12")},
        direct=direct, direct_squared=direct_sq,
        vol_rel_err=abs(chain[0].volume() - vol) / vol, mode_gap=gap,
        consistent=record.profile.kind == _CASE_PROFILE[case],
        metadata={"profile": record.profile.kind, "profile_m": record.profile.m,
                  "r0": record.r0, "T": record.T, "N_t": record.n_t,
                  "N_theta": record.grid.n, "provenance": record.provenance,
                  "g3_base": g3_base},
    )


@dataclass
class StudyReport:
    parameters: list
    reports: list
    w12: list
    l2: list
    final_mass: list
    vol_rel_err: list
    fit_slope: float
    monotonic: bool
    mass_monotonic: bool

    def to_dict(self):
        d = asdict(self)
        d["reports"] = [r.to_dict() if isinstance(r, ChainReport) else r for r in self.reports]
        return d

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["parameter", "l2", "w12", "final_mass", "vol_rel_err"])
            for row in zip(self.parameters, self.l2, self.w12, self.final_mass, self.vol_rel_err):
                w.writerow([f"{x:.17g}" for x in row])


def convergence_study(members, case="pmt-flat", m=0.0, mode="delta-covariant",
                      slack=1e-8, variant="euclidean") -> StudyReport:
    """Chain reports along a family ``[(parameter, record), ...]``.

    Parameters must be positive and strictly decreasing. ``fit_slope`` is the
    least-squares slope of ``log W12`` against ``log parameter``;
    ``monotonic`` says the direct ``W12`` distance decreases strictly and
    ``mass_monotonic`` that ``|m_H(Sigma_T)|`` decreases within ``slack``.
    """
    members = list(members)
    if len(members) < 4:
        raise FamilyTooSmall(f"need at least 4 family members, got {len(members)}")
    params = np.array([p for p, _ in members], dtype=float)
    if np.any(params <= 0) or np.any(np.diff(params) >= 0):
        raise ParameterNotDecreasing("family parameters must be positive and strictly decreasing")
    reports = [chain_report(rec, case, m, mode) for _, rec in members]
    w12 = np.array([r.direct["w12"] for r in reports])
    l2 = np.array([r.direct["l2"] for r in reports])
    mass = np.array([hawking_mass(rec.states[-1], variant) for _, rec in members])
    ok = w12 > 0
    slope = float(np.polyfit(np.log(params[ok]), np.log(w12[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    return StudyReport(
        parameters=params.tolist(), reports=reports, w12=w12.tolist(), l2=l2.tolist(),
        final_mass=mass.tolist(), vol_rel_err=[r.vol_rel_err for r in reports],
        fit_slope=slope, monotonic=bool(np.all(np.diff(w12) < 0)),
        mass_monotonic=bool(np.all(np.diff(np.abs(mass)) < slack)),
    )
