"""Single-qubit gate library.

All gates are 2x2 unitary ndarrays. Rotations follow the convention
R_a(angle) = exp(-i * angle * sigma_a / 2).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "gate_i",
    "gate_x",
    "gate_h",
    "gate_sx",
    "gate_rx",
    "gate_ry",
    "gate_rz",
    "gate_u",
    "three_rot",
]


def gate_i() -> np.ndarray:
    """Identity."""
    return np.eye(2, dtype=complex)


def gate_x() -> np.ndarray:
    """Pauli X (bit flip)."""
    return np.array([[0, 1], [1, 0]], dtype=complex)


def gate_h() -> np.ndarray:
    """Hadamard."""
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def gate_sx() -> np.ndarray:
    """Square root of X."""
    return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


def gate_rx(angle: float) -> np.ndarray:
    """Rotation about the x axis."""
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def gate_ry(angle: float) -> np.ndarray:
    """Rotation about the y axis."""
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def gate_rz(angle: float) -> np.ndarray:
    """Rotation about the z axis."""
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]])


def gate_u(dtheta: float, dchi: float, dlambda: float) -> np.ndarray:
    """General single-qubit gate.

    Matrix form::

        [[cos(dtheta/2),                 -e^{i dlambda} sin(dtheta/2)],
         [e^{i dchi} sin(dtheta/2), e^{i (dchi + dlambda)} cos(dtheta/2)]]

    gate_u(pi/2, 0, pi) is the Hadamard; gate_u(0, 0, lam) equals
    gate_rz(lam) up to a global phase.
    """
    c, s = np.cos(dtheta / 2.0), np.sin(dtheta / 2.0)
    return np.array(
        [
            [c, -np.exp(1j * dlambda) * s],
            [np.exp(1j * dchi) * s, np.exp(1j * (dchi + dlambda)) * c],
        ]
    )


def three_rot(w: float) -> np.ndarray:
    """Composite rotation Ry(-w) Rz(w) Ry(w), rightmost factor applied first.

    Equivalent to a single rotation by w about the axis obtained by tilting
    z toward -x by w.
    """
    return gate_ry(-w) @ gate_rz(w) @ gate_ry(w)
