"""Quadrature and the flat reference metric on the lattice ``Sigma x [0, T]``.

In IMCF gauge the Euclidean metric reads

    delta = (r0^2 / 4) e^t dt^2 + r0^2 e^t sigma,

(the lapse of the round flow, ``1 / H^2 = r^2 / 4`` with ``r = r0 e^{t/2}``).
Its volume form is ``(r0^3 / 2) e^{3t/2} sin(psi) dpsi dphi dt``. Azimuthal
integrals are done analytically.
"""

import numpy as np
from scipy.integrate import simpson


def delta_diagonal(r0, times, psi):
    """Diagonal of ``delta`` as an array ``(n_t, n_psi, 3)`` in (t, psi, phi)."""
    et = np.exp(np.asarray(times))[:, None]
    s2 = np.sin(np.asarray(psi))[None, :] ** 2
    tt = 0.25 * r0**2 * et * np.ones_like(s2)
    pp = r0**2 * et * np.ones_like(s2)
    return np.stack([tt, pp, pp * s2], axis=-1)


def delta_christoffels(psi):
    """Christoffel symbols ``Gam[j, a, b, c]`` of ``delta`` (t-independent).

    Index order (t, psi, phi); shape ``(n_psi, 3, 3, 3)``.
    """
    psi = np.asarray(psi)
    s, c = np.sin(psi), np.cos(psi)
    G = np.zeros((psi.size, 3, 3, 3))
    G[:, 0, 0, 0] = 0.5
    G[:, 0, 1, 1] = -2.0
    G[:, 0, 2, 2] = -2.0 * s**2
    G[:, 1, 0, 1] = G[:, 1, 1, 0] = 0.5
    G[:, 2, 0, 2] = G[:, 2, 2, 0] = 0.5
    G[:, 1, 2, 2] = -s * c
    G[:, 2, 1, 2] = G[:, 2, 2, 1] = c / s
    return G


def time_integral(y, times):
    """Simpson rule along axis 0."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] == 1:
        return np.zeros(y.shape[1:])
    return simpson(y, x=np.asarray(times), axis=0)


def annulus_integral(f, times, grid, r0):
    """``int f dV_delta`` over ``Sigma x [t_0, t_end]`` for samples ``f[k, j]``."""
    f = np.asarray(f, dtype=float)
    jac = 0.5 * r0**3 * np.exp(1.5 * np.asarray(times))
    per_t = (f @ grid.weights) * jac
    return float(time_integral(per_t, times))


def sigma_dt_integral(f, times, grid, r0):
    """``int int f r0^2 e^t dsigma dt`` (leaf area measure in IMCF gauge)."""
    f = np.asarray(f, dtype=float)
    per_t = (f @ grid.weights) * r0**2 * np.exp(np.asarray(times))
    return float(time_integral(per_t, times))
