"""Pure states, density matrices and projective measurement probabilities.

A pure state is a complex ndarray of shape (2,) with unit norm; a density
matrix is a 2x2 Hermitian, unit-trace, positive-semidefinite ndarray.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantViolation
from .validation import check_pure_state, check_unitary

__all__ = ["KET_0", "KET_1", "bloch_state", "apply", "density_of", "measure_probs"]

KET_0 = np.array([1.0, 0.0], dtype=complex)
KET_1 = np.array([0.0, 1.0], dtype=complex)
KET_0.setflags(write=False)
KET_1.setflags(write=False)

TAU = 2.0 * np.pi


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """Pure state at Bloch angles (theta, phi).

    Returns cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>. Angles outside the
    canonical ranges are reduced modulo 2*pi before evaluation; a reduced
    theta in (pi, 2*pi) yields the same ray as (2*pi - theta, phi + pi).
    """
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise InvariantViolation("Bloch angles must be finite")
    th = float(theta) % TAU
    ph = float(phi) % TAU
    return np.array([np.cos(th / 2.0), np.exp(1j * ph) * np.sin(th / 2.0)])


def apply(gate: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Apply a unitary gate to a pure state.

    The result must already be normalized; a norm deviation beyond 1e-10
    signals a broken gate or state and raises InvariantViolation.
    """
    u = check_unitary(gate)
    psi = check_pure_state(state)
    out = u @ psi
    norm = np.linalg.norm(out)
    if abs(norm - 1.0) > 1e-10:
        raise InvariantViolation(f"gate application broke normalization (norm {norm!r})")
    return out


def density_of(state: np.ndarray) -> np.ndarray:
    """Rank-1 density matrix |psi><psi| of a pure state."""
    psi = check_pure_state(state)
    return np.outer(psi, psi.conj())


def measure_probs(state: np.ndarray) -> tuple[float, float]:
    """Computational-basis outcome probabilities (|a0|^2, |a1|^2)."""
    psi = check_pure_state(state)
    return float(abs(psi[0]) ** 2), float(abs(psi[1]) ** 2)
