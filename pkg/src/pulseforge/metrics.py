"""State-closeness metrics: PSD matrix square root and Uhlmann fidelity.

The fidelity between density matrices rho and sigma is
(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; infidelity (1 - fidelity) is the
training cost. Everything here works on 2x2 Hermitian matrices, so the
eigendecompositions are done in closed form rather than through LAPACK.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantViolation
from .validation import as_matrix, check_density_matrix

__all__ = ["matrix_sqrt_psd", "fidelity", "infidelity"]

# Fidelity may exceed 1 by at most this much before it is treated as a bug
# rather than rounding noise.
_OVERSHOOT_TOL = 1e-9


def _eigh2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns (w, V) with eigenvalues ascending and unit-norm eigenvector
    columns such that m = V @ diag(w) @ V†.
    """
    a = m[0, 0].real
    d = m[1, 1].real
    b = m[0, 1]
    mean = 0.5 * (a + d)
    radius = np.sqrt(max(0.25 * (a - d) ** 2 + abs(b) ** 2, 0.0))
    lo, hi = mean - radius, mean + radius
    if abs(b) == 0.0:
        if a <= d:
            return np.array([a, d]), np.eye(2, dtype=complex)
        return np.array([d, a]), np.array([[0, 1], [1, 0]], dtype=complex)
    # (b, hi - a) is the eigenvector for hi; hi - a >= 0 always.
    c = hi - a
    norm = np.sqrt(abs(b) ** 2 + c * c)
    v_hi = np.array([b / norm, c / norm])
    v_lo = np.array([-c / norm, b.conjugate() / norm])
    return np.array([lo, hi]), np.column_stack([v_lo, v_hi])


def matrix_sqrt_psd(m: np.ndarray, eig_floor: float = -1e-10) -> np.ndarray:
    """Hermitian PSD square root S of a 2x2 Hermitian PSD matrix: S @ S = m.

    Eigenvalue dust in [eig_floor, 0) is clamped to zero; anything below
    eig_floor means the input is not PSD and raises InvariantViolation.
    """
    arr = as_matrix(m)
    if np.max(np.abs(arr - arr.conj().T)) > 1e-10:
        raise InvariantViolation("matrix_sqrt_psd requires a Hermitian input")
    w, v = _eigh2(arr)
    if w[0] < eig_floor:
        raise InvariantViolation(f"matrix is not PSD (eigenvalue {w[0]!r})")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def _fidelity_core(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity without input validation; both arguments must be valid.

    For 2x2 density matrices (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 equals
    tr(rho sigma) + 2 sqrt(det(rho) det(sigma)) exactly: with mu_1, mu_2 the
    eigenvalues of sqrt(rho) sigma sqrt(rho), the squared trace of the root
    is mu_1 + mu_2 + 2 sqrt(mu_1 mu_2), and trace/determinant are similarity
    invariants. The algebraic form avoids taking square roots of the
    cancellation dust that near-pure states leave in the small eigenvalue,
    which costs ~1e-8 of accuracy on the eigendecomposition route.
    """
    overlap = float(np.trace(rho @ sigma).real)
    det_r = float((rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real)
    det_s = float((sigma[0, 0] * sigma[1, 1] - sigma[0, 1] * sigma[1, 0]).real)
    value = overlap + 2.0 * float(np.sqrt(max(det_r, 0.0) * max(det_s, 0.0)))
    if value > 1.0 + _OVERSHOOT_TOL or value < -_OVERSHOOT_TOL:
        raise InvariantViolation(f"fidelity {value!r} overshoots [0, 1] beyond rounding")
    return min(max(value, 0.0), 1.0)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity between two density matrices, clamped to [0, 1]."""
    r = check_density_matrix(rho)
    s = check_density_matrix(sigma)
    return _fidelity_core(r, s)


def infidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """1 - fidelity; the training cost."""
    return 1.0 - fidelity(rho, sigma)
