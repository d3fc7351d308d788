"""Cyclic Jacobi eigen-solver for small dense Hermitian matrices."""

from __future__ import annotations

import numpy as np

from .errors import NumericalError

HERMITIAN_TOL = 1e-10
CONVERGENCE_TOL = 1e-12
MAX_SWEEPS = 60


def _check_hermitian(m: np.ndarray, tol: float) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def jacobi_eigh(m, tol: float = CONVERGENCE_TOL, hermitian_tol: float = HERMITIAN_TOL):
    """Diagonalise a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol`` times the matrix norm.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues sorted in descending order.
    eigenvectors : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = _check_hermitian(m, hermitian_tol).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n > 1 and norm > 0:
        for _ in range(MAX_SWEEPS):
            off = np.linalg.norm(a - np.diag(np.diag(a)))
            if off <= tol * norm:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    mag = abs(apq)
                    if mag <= 1e-300:
                        continue
                    phase = apq / mag
                    app = a[p, p].real
                    aqq = a[q, q].real
                    theta = (aqq - app) / (2.0 * mag)
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta == 0.0:
                        t = 1.0
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    # phase-align a[p, q] to a real value, then a real rotation
                    rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                    cols = a[:, [p, q]] @ rot
                    a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                    rows = rot.conj().T @ a[[p, q], :]
                    a[p, :], a[q, :] = rows[0], rows[1]
                    a[p, q] = a[q, p] = 0.0
                    vc = v[:, [p, q]] @ rot
                    v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
        else:
            raise NumericalError("Jacobi iteration did not converge")
    evals = np.real(np.diag(a))
    order = np.argsort(-evals, kind="stable")
    return evals[order], v[:, order]


def hermitian_eigenvalues(m, tol: float = CONVERGENCE_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, descending."""
    return jacobi_eigh(m, tol)[0]


def hermitian_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    w, v = jacobi_eigh(m)
    if w.size and w[-1] < -1e-9:
        raise NumericalError(f"matrix has negative eigenvalue {w[-1]:.3g}")
    # roundoff-level eigenvalues would otherwise contribute ~1e-8 after the root
    w = np.where(w > 1e-14 * max(1.0, w[0]), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T
