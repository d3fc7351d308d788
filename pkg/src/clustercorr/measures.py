"""Two- and three-qubit entanglement measures used as baselines for the cumulant signature."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NumericalError
from .linalg import hermitian_sqrt
from .qstate import TOL, DensityMatrix, StateVector, partial_trace

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)


def _need(state, n: int, what: str):
    if state.num_qubits != n:
        raise ValueError(f"{what} needs a {n}-qubit state, got {state.num_qubits}")


def concurrence_signed(state: StateVector, tol: float = TOL) -> float:
    """``<psi| sy (x) sy |psi*>`` for a two-qubit pure state.

    The sign is kept; ``abs`` gives the usual concurrence.
    """
    _need(state, 2, "concurrence")
    psi = state.amplitudes
    value = np.vdot(psi, YY @ psi.conj())
    if abs(value.imag) > tol:
        raise NumericalError(f"concurrence has imaginary part {value.imag:.3g}")
    return float(value.real)


def wootters_lambdas(rho: DensityMatrix) -> np.ndarray:
    """Descending square roots of the eigenvalues of ``rho rho~``.

    ``rho rho~`` is similar to ``A A^dagger`` with ``A = sqrt(rho) sqrt(rho~)``,
    so the roots are the singular values of ``A``.  This avoids taking square
    roots of roundoff-level eigenvalues.
    """
    _need(rho, 2, "Wootters concurrence")
    root = hermitian_sqrt(rho.entries)
    flipped_root = YY @ root.conj() @ YY
    return np.linalg.svd(root @ flipped_root, compute_uv=False)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """``max(0, l1 - l2 - l3 - l4)`` for a two-qubit density matrix."""
    lam = wootters_lambdas(rho)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class TangleReport:
    """Three-tangle with its ingredients.

    ``tau`` is ``c_sq_A_BC - c_sq_AB - c_sq_AC``; ``tau_lambda`` is the
    equivalent ``2 (l1 l2)_AB + 2 (l1 l2)_AC`` form.
    """

    tau: float
    tau_lambda: float
    c_sq_A_BC: float
    c_sq_AB: float
    c_sq_AC: float
    lambda_pairs: dict

    def to_json(self) -> dict:
        return asdict(self)


def three_tangle(state: StateVector, tol: float = 1e-8) -> TangleReport:
    """Three-tangle of a pure three-qubit state, split as particle 1 versus 2 and 3.

    ``c_sq_A_BC`` is ``4 det(rho_A)``, the pure-state tangle of particle 1
    with the rest.
    """
    _need(state, 3, "three-tangle")
    rho_a = partial_trace(state, [1]).entries
    c_a_bc = float(4 * np.linalg.det(rho_a).real)
    lam_ab = wootters_lambdas(partial_trace(state, [1, 2]))
    lam_ac = wootters_lambdas(partial_trace(state, [1, 3]))
    c_ab = max(0.0, lam_ab[0] - lam_ab[1] - lam_ab[2] - lam_ab[3]) ** 2
    c_ac = max(0.0, lam_ac[0] - lam_ac[1] - lam_ac[2] - lam_ac[3]) ** 2
    tau = c_a_bc - c_ab - c_ac
    tau_lam = 2 * (lam_ab[0] * lam_ab[1] + lam_ac[0] * lam_ac[1])
    if not -tol <= tau <= 1 + tol:
        raise NumericalError(f"three-tangle {tau:.6g} outside [0, 1]")
    return TangleReport(
        tau=float(tau),
        tau_lambda=float(tau_lam),
        c_sq_A_BC=c_a_bc,
        c_sq_AB=float(c_ab),
        c_sq_AC=float(c_ac),
        lambda_pairs={"AB": [float(v) for v in lam_ab], "AC": [float(v) for v in lam_ac]},
    )


def w_avg_sq_concurrence(n: int) -> float:
    """Average squared pairwise concurrence of the ``n``-particle W state, ``4 / n**2``."""
    if n < 2:
        raise ValueError("W state needs at least 2 particles")
    return 4.0 / n**2
