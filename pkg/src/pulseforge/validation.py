"""Input validation helpers.

States, density matrices and gates are plain complex ndarrays; these helpers
coerce shapes/dtypes and enforce the structural invariants each kind of value
must satisfy. All checks raise :class:`~pulseforge.errors.InvariantViolation`
on failure so callers can distinguish bad values from programming errors.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantViolation

__all__ = [
    "as_state",
    "as_matrix",
    "check_pure_state",
    "check_density_matrix",
    "check_unitary",
    "check_state_array",
    "check_target_states",
]


def as_state(psi) -> np.ndarray:
    """Coerce to a complex vector of shape (2,) without validating its norm."""
    arr = np.asarray(psi, dtype=complex)
    if arr.shape != (2,):
        raise InvariantViolation(f"state must have shape (2,), got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise InvariantViolation("state contains non-finite entries")
    return arr


def as_matrix(m) -> np.ndarray:
    """Coerce to a complex matrix of shape (2, 2)."""
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (2, 2):
        raise InvariantViolation(f"matrix must have shape (2, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise InvariantViolation("matrix contains non-finite entries")
    return arr


def check_pure_state(psi, atol: float = 1e-10) -> np.ndarray:
    """Validate a pure state: shape (2,) and unit norm within ``atol``."""
    arr = as_state(psi)
    norm = np.linalg.norm(arr)
    if abs(norm - 1.0) > atol:
        raise InvariantViolation(f"state norm {norm!r} deviates from 1 by more than {atol}")
    return arr


def check_density_matrix(rho, herm_atol: float = 1e-12, eig_floor: float = -1e-10) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, eigenvalues >= ``eig_floor``."""
    arr = as_matrix(rho)
    if np.max(np.abs(arr - arr.conj().T)) > herm_atol:
        raise InvariantViolation("density matrix is not Hermitian")
    tr = np.trace(arr).real
    if abs(tr - 1.0) > herm_atol:
        raise InvariantViolation(f"density matrix trace {tr!r} deviates from 1")
    # 2x2 Hermitian eigenvalues in closed form; avoids LAPACK in hot paths.
    half_tr = 0.5 * (arr[0, 0].real + arr[1, 1].real)
    det = (arr[0, 0] * arr[1, 1] - arr[0, 1] * arr[1, 0]).real
    disc = max(half_tr * half_tr - det, 0.0)
    lam_min = half_tr - np.sqrt(disc)
    if lam_min < eig_floor:
        raise InvariantViolation(f"density matrix has eigenvalue {lam_min!r} below {eig_floor}")
    return arr


def check_unitary(u, atol: float = 1e-10) -> np.ndarray:
    """Validate a gate matrix: U†U = I within ``atol``."""
    arr = as_matrix(u)
    defect = np.max(np.abs(arr.conj().T @ arr - np.eye(2)))
    if defect > atol:
        raise InvariantViolation(f"matrix is not unitary (defect {defect:.3e} > {atol})")
    return arr


def check_state_array(X, name: str = "X") -> np.ndarray:
    """Validate an (n, 2) array of pure states (rows normalized within 1e-8)."""
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise InvariantViolation(f"{name} must have shape (n, 2), got {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise InvariantViolation(f"{name} rows must be unit-norm states")
    return arr


def check_target_states(y, n: int) -> np.ndarray:
    """Validate fit targets: (n, 2) states or (n, 2, 2) density matrices.

    Always returns an (n, 2, 2) array of density matrices.
    """
    arr = np.asarray(y, dtype=complex)
    if arr.shape == (n, 2):
        check_state_array(arr, name="y")
        # np.outer rather than einsum so the densities are bit-identical to
        # density_of (einsum's FMA path leaves ~1e-17 imaginary dust)
        return np.stack([np.outer(row, row.conj()) for row in arr])
    if arr.shape == (n, 2, 2):
        for k in range(n):
            check_density_matrix(arr[k])
        return arr
    raise InvariantViolation(f"y must have shape ({n}, 2) or ({n}, 2, 2), got {arr.shape}")
