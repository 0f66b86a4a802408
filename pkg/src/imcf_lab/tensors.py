"""Covariant calculus for axisymmetric tensors on a leaf.

Coordinates are ``(theta, phi)`` (index 0 and 1). Metrics are diagonal,
``E(theta) dtheta^2 + G(theta) dphi^2``, and fields do not depend on
``phi``. Tensor samples are arrays of shape ``(N, 2, ..., 2)`` with all
indices covariant.

Under reflection through a pole a component with ``k`` theta-indices picks
up the sign ``(-1)^k``; this fixes the ghost values used by the centered
theta-derivative.
"""

import itertools

import numpy as np

from ._fd import d_theta


def christoffels(E, dE, G, dG):
    """``Gamma[:, a, b, c]`` = Gamma^a_{bc} of ``E dtheta^2 + G dphi^2``."""
    n = np.shape(E)[0]
    Gam = np.zeros((n, 2, 2, 2))
    Gam[:, 0, 0, 0] = dE / (2 * E)
    Gam[:, 0, 1, 1] = -dG / (2 * E)
    Gam[:, 1, 0, 1] = Gam[:, 1, 1, 0] = dG / (2 * G)
    return Gam


def _component_parity(index):
    return -1 if index.count(0) % 2 else 1


def partial_theta(T, dtheta):
    """Componentwise centered theta-derivative with parity-aware ghosts."""
    out = np.empty_like(T)
    rank = T.ndim - 1
    for idx in itertools.product((0, 1), repeat=rank):
        comp = T[(slice(None),) + idx]
        # derivative of a component with parity p is handled by reflecting
        # the component itself with p
        out[(slice(None),) + idx] = d_theta(comp, dtheta, _component_parity(idx))
    return out


def covariant_derivative(T, Gam, dtheta):
    """``(nabla T)[:, c, i1, ..., ik] = nabla_c T_{i1...ik}``."""
    n = T.shape[0]
    rank = T.ndim - 1
    out = np.zeros((n, 2) + T.shape[1:])
    out[:, 0] = partial_theta(T, dtheta)
    letters = "ijklmn"[:rank]
    for slot in range(rank):
        # - Gamma^d_{c i_slot} T_{... d ...}
        src = letters[:slot] + "d" + letters[slot + 1:]
        expr = f"zdc{letters[slot]},z{src}->zc{letters}"
        out -= np.einsum(expr, Gam, T)
    return out


def norm2(T, ginv_diag):
    """``|T|^2`` with indices raised by a diagonal inverse metric.

    ``ginv_diag`` has shape ``(N, 2)``.
    """
    rank = T.ndim - 1
    w = np.ones(T.shape)
    for slot in range(rank):
        shape = [T.shape[0]] + [1] * rank
        shape[slot + 1] = 2
        w = w * ginv_diag.reshape(shape)
    return np.sum(w * T**2, axis=tuple(range(1, rank + 1)))


def to_frame(T, E, G):
    """Components of a covariant tensor in the orthonormal frame
    ``(d_theta / sqrt(E), d_phi / sqrt(G))``."""
    rank = T.ndim - 1
    scale = np.stack([1 / np.sqrt(E), 1 / np.sqrt(G)], axis=1)
    out = T.copy()
    for slot in range(rank):
        shape = [T.shape[0]] + [1] * rank
        shape[slot + 1] = 2
        out = out * scale.reshape(shape)
    return out


def frame_connection(E, G, dG):
    """Connection coefficients ``W[:, c, a, b]`` with ``nabla_{e_a} e_b = W^c_{ab} e_c``.

    Only ``nabla_{e_phi} e_theta = kappa e_phi`` and
    ``nabla_{e_phi} e_phi = -kappa e_theta`` survive, with
    ``kappa = d_theta sqrt(G) / sqrt(E G)``.
    """
    kappa = dG / (2 * G * np.sqrt(E))
    W = np.zeros((np.shape(E)[0], 2, 2, 2))
    W[:, 1, 1, 0] = kappa
    W[:, 0, 1, 1] = -kappa
    return W


def frame_covariant_derivative(T, E, W, dtheta):
    """``nabla_a T_{i...}`` with every index in the orthonormal frame.

    Frame components are regular at the poles, so the centered differences
    are not amplified by ``1 / sin(theta)`` factors.
    """
    n = T.shape[0]
    rank = T.ndim - 1
    out = np.zeros((n, 2) + T.shape[1:])
    out[:, 0] = partial_theta(T, dtheta) / np.sqrt(E).reshape((n,) + (1,) * rank)
    letters = "ijklmn"[:rank]
    for slot in range(rank):
        src = letters[:slot] + "d" + letters[slot + 1:]
        out -= np.einsum(f"zdc{letters[slot]},z{src}->zc{letters}", W, T)
    return out
