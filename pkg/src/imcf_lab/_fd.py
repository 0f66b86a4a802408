"""Finite-difference stencils shared by the leaf and flow modules."""

import numpy as np

from .errors import NotEnoughTimeNodes


def pad_theta(f, parity=1):
    """Add one reflected ghost node at each pole.

    Nodes are staggered (no node sits on a pole), so the ghost beyond the
    north pole is the mirror image of node 0 and likewise at the south pole.
    ``parity`` is +1 for quantities even under reflection through the pole
    and -1 for odd ones (e.g. a theta-derivative of an even field).
    Reflection acts on axis 0.
    """
    f = np.asarray(f, dtype=float)
    return np.concatenate([parity * f[:1], f, parity * f[-1:]], axis=0)


def d_theta(f, dtheta, parity=1):
    """Centered first derivative along axis 0 with pole reflection."""
    p = pad_theta(f, parity)
    return (p[2:] - p[:-2]) / (2.0 * dtheta)


def d2_theta(f, dtheta, parity=1):
    """Centered second derivative along axis 0 with pole reflection."""
    p = pad_theta(f, parity)
    return (p[2:] - 2.0 * p[1:-1] + p[:-2]) / dtheta**2


_LEFT = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)


def d_time(f, dt):
    """Fourth-order first derivative along axis 0 at every node.

    Interior nodes use the five-point centered stencil, the two nodes at
    each end use one-sided five-point stencils. Three or four nodes fall
    back to second order (``numpy.gradient``).
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    if n < 3:
        raise NotEnoughTimeNodes(f"time derivative needs >= 3 nodes, got {n}")
    if n < 5:
        return np.gradient(f, dt, axis=0, edge_order=2)
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dt)
    head = f[:5]
    tail = f[-5:][::-1]
    for i, w in enumerate(_LEFT):
        out[i] = np.tensordot(w, head, axes=(0, 0)) / dt
        out[n - 1 - i] = -np.tensordot(w, tail, axes=(0, 0)) / dt
    return out
