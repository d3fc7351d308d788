"""Pure and mixed multi-qubit states.

Basis convention: index ``i`` with binary digits ``b1 b2 ... bn`` (``b1`` most
significant) is the ket ``|b1 b2 ... bn>``, so particle 1 is the leftmost
symbol of a ket label and the most significant bit of the index.  Particles
are numbered from 1 in every public function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import NumericalError
from .linalg import hermitian_eigenvalues

TOL = 1e-10
MAX_QUBITS = 14

AXES = "Ixyz"


def _as_complex_vector(amplitudes) -> np.ndarray:
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    n = amps.size.bit_length() - 1
    if amps.size < 2 or (1 << n) != amps.size:
        raise ValueError(f"amplitude count {amps.size} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return amps


class StateVector:
    """Normalised pure state of ``num_qubits`` qubits.

    Instances are treated as immutable; the amplitude array is flagged
    read-only.
    """

    __slots__ = ("amplitudes", "num_qubits")

    def __init__(self, amplitudes, *, normalize: bool = False, tol: float = TOL):
        amps = _as_complex_vector(amplitudes).copy()
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalise the zero vector")
            amps /= norm
        elif abs(norm - 1.0) > tol:
            raise ValueError(f"state is not normalised (norm {norm:.12g})")
        amps.flags.writeable = False
        self.amplitudes = amps
        self.num_qubits = amps.size.bit_length() - 1

    @classmethod
    def from_terms(cls, terms: Mapping[str, complex], normalize: bool = True) -> "StateVector":
        """Build a state from ``{"0101": amplitude, ...}`` ket labels."""
        labels = list(terms)
        if not labels:
            raise ValueError("no terms given")
        n = len(labels[0])
        amps = np.zeros(1 << n, dtype=complex)
        for label, amp in terms.items():
            if len(label) != n or set(label) - {"0", "1"}:
                raise ValueError(f"bad ket label {label!r}")
            amps[int(label, 2)] += amp
        return cls(amps, normalize=normalize)

    @classmethod
    def basis(cls, label: str) -> "StateVector":
        return cls.from_terms({label: 1.0})

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per particle."""
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def terms(self, tol: float = 1e-12) -> dict[str, complex]:
        """Nonzero amplitudes keyed by ket label."""
        n = self.num_qubits
        return {
            format(i, f"0{n}b"): complex(a)
            for i, a in enumerate(self.amplitudes)
            if abs(a) > tol
        }

    def __repr__(self) -> str:
        body = " + ".join(f"({a.real:.4g}{a.imag:+.4g}j)|{k}>" for k, a in self.terms().items())
        return f"StateVector[{self.num_qubits}]({body})"


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix on ``num_qubits`` qubits."""

    __slots__ = ("entries", "num_qubits")

    def __init__(self, entries, *, tol: float = TOL, check_psd: bool = True):
        rho = np.asarray(entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        n = rho.shape[0].bit_length() - 1
        if rho.shape[0] < 2 or (1 << n) != rho.shape[0]:
            raise ValueError("density matrix dimension must be a power of two >= 2")
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > tol:
            raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        if check_psd and n <= 5:
            low = hermitian_eigenvalues(rho)[-1]
            if low < -tol:
                raise ValueError(f"density matrix has negative eigenvalue {low:.3g}")
        rho.flags.writeable = False
        self.entries = rho
        self.num_qubits = n

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        psi = state.amplitudes
        return cls(np.outer(psi, psi.conj()), check_psd=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix[{self.num_qubits}]"


@dataclass(frozen=True)
class PauliString:
    """Per-particle axis labels drawn from ``I``, ``x``, ``y``, ``z``."""

    axes: str

    def __post_init__(self):
        if not self.axes or set(self.axes) - set(AXES):
            raise ValueError(f"invalid Pauli string {self.axes!r}")

    def __len__(self) -> int:
        return len(self.axes)

    def __str__(self) -> str:
        return self.axes

    @property
    def support(self) -> tuple[int, ...]:
        """0-based positions carrying a non-identity axis."""
        return tuple(k for k, a in enumerate(self.axes) if a != "I")

    def masks(self, n: int | None = None) -> tuple[int, int, int]:
        """``(xmask, zmask, ny)`` with ``P = i**ny * X^xmask Z^zmask``."""
        n = len(self.axes) if n is None else n
        xm = zm = ny = 0
        for k, a in enumerate(self.axes):
            bit = 1 << (n - 1 - k)
            if a in "xy":
                xm |= bit
            if a in "yz":
                zm |= bit
            if a == "y":
                ny += 1
        return xm, zm, ny


@dataclass(frozen=True)
class Outcome:
    """One branch of a projective measurement."""

    label: str
    probability: float
    post_state: StateVector | None = field(default=None, repr=False)


State = Union[StateVector, DensityMatrix]


def as_pauli(p) -> PauliString:
    return p if isinstance(p, PauliString) else PauliString(str(p))


def _popcount_parity(arr: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each entry of an unsigned integer array."""
    arr = arr.copy()
    parity = np.zeros_like(arr)
    while np.any(arr):
        parity ^= arr & 1
        arr >>= 1
    return parity


def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def apply_pauli(state: StateVector, p) -> np.ndarray:
    """Return ``P|psi>`` as a raw amplitude array, using bit flips and phases only."""
    p = as_pauli(p)
    n = state.num_qubits
    if len(p) != n:
        raise ValueError(f"Pauli string of length {len(p)} on {n} qubits")
    xm, zm, ny = p.masks()
    idx = _indices(n)
    signs = 1 - 2 * _popcount_parity(idx & zm)
    out = np.empty_like(state.amplitudes)
    out[idx ^ xm] = (1j**ny) * signs * state.amplitudes
    return out


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """``a`` on the leading particles, ``b`` on the trailing ones."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def _check_perm(perm: Sequence[int], n: int) -> list[int]:
    perm = [int(k) for k in perm]
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    return perm


def permute_particles(state: StateVector, perm: Sequence[int]) -> StateVector:
    """Relabel particles: particle ``k`` of the result is particle ``perm[k-1]`` of ``state``.

    ``perm`` is 1-based.  For the swap ``(2, 1, 3, 4)`` the ket ``|b1 b2 b3 b4>``
    becomes ``|b2 b1 b3 b4>``.
    """
    perm = _check_perm(perm, state.num_qubits)
    t = np.transpose(state.tensor(), [k - 1 for k in perm])
    return StateVector(t.reshape(-1))


def permute_pauli(p, perm: Sequence[int]) -> PauliString:
    """Apply the same relabelling as :func:`permute_particles` to a Pauli string."""
    p = as_pauli(p)
    perm = _check_perm(perm, len(p))
    return PauliString("".join(p.axes[k - 1] for k in perm))


def transposition_perm(n: int, *swaps: tuple[int, int]) -> list[int]:
    """Permutation list for a product of disjoint 1-based swaps."""
    perm = list(range(1, n + 1))
    for i, j in swaps:
        perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return perm


def _diag_offsets(state: State, xm: int) -> np.ndarray:
    """``v[i] = rho[i, i ^ xm]`` for either representation."""
    n = state.num_qubits
    idx = _indices(n)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        return psi * psi[idx ^ xm].conj()
    return state.entries[idx, idx ^ xm]


def expectation(state: State, p, tol: float = TOL) -> float:
    """``<P>`` for a pure or mixed state; the identity string gives 1."""
    p = as_pauli(p)
    n = state.num_qubits
    if len(p) != n:
        raise ValueError(f"Pauli string of length {len(p)} on {n} qubits")
    xm, zm, ny = p.masks()
    v = _diag_offsets(state, xm)
    signs = 1 - 2 * _popcount_parity(_indices(n) & zm)
    value = (1j**ny) * np.sum(signs * v)
    if abs(value.imag) > tol:
        raise NumericalError(f"imaginary residue {value.imag:.3g} in <{p}>")
    return float(value.real)


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis."""
    shape = v.shape
    n = shape[-1].bit_length() - 1
    out = v.reshape(shape[:-1] + (2,) * n)
    for k in range(n):
        axis = len(shape) - 1 + k
        a = np.take(out, 0, axis=axis)
        b = np.take(out, 1, axis=axis)
        out = np.stack([a + b, a - b], axis=axis)
    return out.reshape(shape)


def pauli_expectations(state: State, tol: float = TOL) -> np.ndarray:
    """All ``4**n`` Pauli expectations as an array of shape ``(4,) * n``.

    Axis values index ``I, x, y, z`` in that order.  Each row
    ``v_x[i] = rho[i, i ^ x]`` is Walsh-Hadamard transformed to give
    ``<X^x Z^z>`` for every ``z`` at once, so no Pauli matrix is formed.
    """
    n = state.num_qubits
    idx = _indices(n)
    rows = np.stack([_diag_offsets(state, xm) for xm in range(1 << n)])
    xz = _walsh_hadamard(rows)  # xz[xmask, zmask]
    # per qubit: I=(0,0) x=(1,0) y=(1,1) z=(0,1); y carries a factor i
    xbits = np.array([0, 1, 1, 0])
    zbits = np.array([0, 0, 1, 1])
    codes = np.indices((4,) * n).reshape(n, -1)
    weights = 1 << np.arange(n - 1, -1, -1)
    xm = (xbits[codes] * weights[:, None]).sum(axis=0)
    zm = (zbits[codes] * weights[:, None]).sum(axis=0)
    ny = (codes == 2).sum(axis=0)
    vals = (1j**ny) * xz[xm, zm]
    if np.max(np.abs(vals.imag), initial=0.0) > tol * max(1, len(idx)):
        raise NumericalError("imaginary residue in Pauli expectation tensor")
    return vals.real.reshape((4,) * n)


def _as_density(state: State) -> DensityMatrix:
    return DensityMatrix.from_state(state) if isinstance(state, StateVector) else state


def partial_trace(state: State, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the 1-based particles in ``keep`` (kept in ascending order)."""
    n = state.num_qubits
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set is empty")
    if keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"keep set {keep} out of range 1..{n}")
    drop = [k for k in range(1, n + 1) if k not in keep]
    m = len(keep)
    if isinstance(state, StateVector):
        t = np.transpose(state.tensor(), [k - 1 for k in keep + drop])
        t = t.reshape(1 << m, -1)
        rho = t @ t.conj().T
    else:
        t = state.entries.reshape((2,) * (2 * n))
        order = [k - 1 for k in keep + drop]
        t = np.transpose(t, order + [n + k for k in order])
        t = t.reshape(1 << m, 1 << (n - m), 1 << m, 1 << (n - m))
        rho = np.einsum("ajbj->ab", t)
    return DensityMatrix(rho, check_psd=False)


def von_neumann_entropy(rho: State, tol: float = 1e-9) -> float:
    """Entropy in bits; ``0 log 0 = 0``."""
    if isinstance(rho, StateVector):
        return 0.0
    w = hermitian_eigenvalues(rho.entries)
    if w[-1] < -tol:
        raise NumericalError(f"negative eigenvalue {w[-1]:.3g} in entropy")
    w = w[w > 1e-14]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|^2``."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("fidelity of states with different qubit counts")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state from normalised complex Gaussians."""
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v, normalize=True)


# JSON formats

def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def state_to_json(state: State) -> dict:
    if isinstance(state, StateVector):
        return {"num_qubits": state.num_qubits, "amplitudes": [_pair(a) for a in state.amplitudes]}
    return {
        "num_qubits": state.num_qubits,
        "rows": [[_pair(a) for a in row] for row in state.entries],
    }


def state_from_json(data: dict | str) -> State:
    if isinstance(data, str):
        data = json.loads(data)
    n = int(data["num_qubits"])
    if "amplitudes" in data:
        amps = [complex(re, im) for re, im in data["amplitudes"]]
        if len(amps) != 1 << n:
            raise ValueError(f"expected {1 << n} amplitudes, got {len(amps)}")
        return StateVector(amps)
    if "rows" in data:
        rows = np.array([[complex(re, im) for re, im in row] for row in data["rows"]])
        if rows.shape != (1 << n, 1 << n):
            raise ValueError(f"expected a {1 << n}x{1 << n} matrix, got {rows.shape}")
        return DensityMatrix(rows)
    raise ValueError("state JSON needs 'amplitudes' or 'rows'")
