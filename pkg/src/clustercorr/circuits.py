"""Gate-level simulation and preparation circuits for catalog states.

Gates act on 1-based particle indices.  Two-qubit gates list the control
first.  Preparation circuits are derived from each state's algebraic form
and accepted only if they reproduce the catalog state.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import StateSpec, make_state, parse_spec
from .qstate import StateVector

_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
_FIXED = {
    "H": _H,
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}
_ARITY = {"H": 1, "X": 1, "Y": 1, "Z": 1, "PHASE": 1, "RY": 1, "CNOT": 2, "CZ": 2, "CRY": 2}
KINDS = tuple(_ARITY) + ("CUSTOM",)

_ANGLE_NAMES = {"acos": math.acos, "asin": math.asin, "sqrt": math.sqrt, "pi": math.pi}


def eval_angle(expr: float | str) -> float:
    """Evaluate an angle given as a number or an arithmetic expression such as ``2*acos(sqrt(1/3))``."""
    if not isinstance(expr, str):
        return float(expr)
    tree = ast.parse(expr, mode="eval")
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id not in _ANGLE_NAMES:
            raise ValueError(f"unknown name {node.id!r} in angle {expr!r}")
        if not isinstance(
            node,
            (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
             ast.operator, ast.unaryop),
        ):
            raise ValueError(f"unsupported syntax in angle {expr!r}")
    return float(eval(compile(tree, "<angle>", "eval"), {"__builtins__": {}}, _ANGLE_NAMES))


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def _controlled(u: np.ndarray) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    return m


@dataclass(frozen=True)
class Gate:
    """A one- or two-qubit gate.

    ``angle`` is used by ``PHASE``, ``RY`` and ``CRY`` and may be an
    expression string.  ``matrix`` is used by ``CUSTOM``.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float | str | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("gate targets must be distinct")
        if kind == "CUSTOM":
            if self.matrix is None:
                raise ValueError("CUSTOM gate needs a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2 ** len(self.targets),) * 2:
                raise ValueError("CUSTOM matrix size does not match its targets")
            object.__setattr__(self, "matrix", m)
        elif len(self.targets) != _ARITY[kind]:
            raise ValueError(f"{kind} takes {_ARITY[kind]} target(s)")
        if kind in ("PHASE", "RY", "CRY") and self.angle is None:
            raise ValueError(f"{kind} needs an angle")
        u = self.unitary()
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-10:
            raise ValueError("gate matrix is not unitary")

    def unitary(self) -> np.ndarray:
        k = self.kind
        if k in _FIXED:
            return _FIXED[k].astype(complex)
        if k == "PHASE":
            return np.diag([1, np.exp(1j * eval_angle(self.angle))])
        if k == "RY":
            return _ry(eval_angle(self.angle)).astype(complex)
        if k == "CNOT":
            return _controlled(_FIXED["X"])
        if k == "CZ":
            return np.diag([1, 1, 1, -1]).astype(complex)
        if k == "CRY":
            return _controlled(_ry(eval_angle(self.angle)))
        return self.matrix

    def to_json(self) -> dict:
        out = {"kind": self.kind, "targets": list(self.targets)}
        if self.angle is not None:
            out["angle"] = self.angle
        if self.kind == "CUSTOM":
            out["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Gate":
        m = d.get("matrix")
        if m is not None:
            m = np.array([[complex(re, im) for re, im in row] for row in m])
        return cls(d["kind"], tuple(d["targets"]), d.get("angle"), m)

    def __str__(self) -> str:
        args = ",".join(map(str, self.targets))
        return f"{self.kind}({args}{'' if self.angle is None else f'; {self.angle}'})"


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if min(g.targets) < 1 or max(g.targets) > self.num_qubits:
                raise ValueError(f"gate {g} acts outside particles 1..{self.num_qubits}")

    def to_json(self) -> dict:
        return {"num_qubits": self.num_qubits, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Circuit":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["num_qubits"]), tuple(Gate.from_json(g) for g in data["gates"]))

    def __str__(self) -> str:
        return " ".join(str(g) for g in self.gates) or "(empty)"


def apply_gate(state: StateVector, g: Gate) -> StateVector:
    """Apply ``g`` by contracting its matrix into the particle axes."""
    n = state.num_qubits
    if min(g.targets) < 1 or max(g.targets) > n:
        raise ValueError(f"gate {g} acts outside particles 1..{n}")
    k = len(g.targets)
    axes = [t - 1 for t in g.targets]
    u = g.unitary().reshape((2,) * (2 * k))
    out = np.tensordot(u, state.tensor(), axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first; move them back into place
    out = np.moveaxis(out, list(range(k)), axes)
    return StateVector(out.reshape(-1))


def run_circuit(c: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply the gates left to right, starting from ``|0...0>`` by default."""
    if initial is None:
        initial = StateVector.basis("0" * c.num_qubits)
    if initial.num_qubits != c.num_qubits:
        raise ValueError("circuit and state sizes differ")
    state = initial
    for g in c.gates:
        state = apply_gate(state, g)
    return state


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different sizes")
    return abs(np.vdot(a.amplitudes, b.amplitudes)) > 1 - tol


# --- synthesis -------------------------------------------------------------


def _row_reduce(vectors: list[int], n: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form over GF(2) of bit-vectors (bit ``n - q`` is particle ``q``)."""
    rows: list[int] = []
    pivots: list[int] = []
    for v in vectors:
        for r, p in zip(rows, pivots):
            if v >> (n - p) & 1:
                v ^= r
        if v == 0:
            continue
        p = next(q for q in range(1, n + 1) if v >> (n - q) & 1)
        rows = [r ^ v if r >> (n - p) & 1 else r for r in rows]
        rows.append(v)
        pivots.append(p)
    order = sorted(range(len(pivots)), key=pivots.__getitem__)
    return [rows[i] for i in order], [pivots[i] for i in order]


def _anf(values: list[int]) -> list[int]:
    """Algebraic normal form coefficients of a Boolean function given as a truth table."""
    c = list(values)
    k = len(c).bit_length() - 1
    for j in range(k):
        for m in range(len(c)):
            if m >> j & 1:
                c[m] ^= c[m ^ (1 << j)]
    return c


def stabilizer_like_circuit(state: StateVector, tol: float = 1e-10) -> Circuit:
    """Circuit for an equal-weight state with real signs on an affine support.

    The support must be ``offset + span(g_1..g_k)`` and the sign a quadratic
    form in the span coordinates.  Hadamards on pivot particles make the
    uniform superposition, ``Z``/``CZ`` add the signs, CNOTs copy the pivots
    onto the other particles and ``X`` shifts by the offset.
    """
    n = state.num_qubits
    amps = state.amplitudes
    support = [i for i in range(state.dim) if abs(amps[i]) > tol]
    k = len(support).bit_length() - 1
    if 1 << k != len(support):
        raise ValueError("support size is not a power of two")
    mag = abs(amps[support[0]])
    if any(abs(abs(amps[i]) - mag) > tol for i in support):
        raise ValueError("amplitudes are not of equal weight")
    base = support[0]
    rows, pivots = _row_reduce([i ^ base for i in support[1:]], n)
    if len(rows) != k:
        raise ValueError("support is not an affine subspace")
    offset = base
    for r, p in zip(rows, pivots):
        if offset >> (n - p) & 1:
            offset ^= r

    def point(a: int) -> int:
        x = offset
        for j, r in enumerate(rows):
            if a >> (k - 1 - j) & 1:
                x ^= r
        return x

    ref = amps[point(0)]
    bits = []
    for a in range(1 << k):
        ratio = amps[point(a)] / ref
        if abs(ratio - 1) < tol:
            bits.append(0)
        elif abs(ratio + 1) < tol:
            bits.append(1)
        else:
            raise ValueError("relative phases are not +-1")
    # truth table is indexed with coordinate j at bit (k - 1 - j); _anf uses bit j
    table = [bits[sum(((m >> j) & 1) << (k - 1 - j) for j in range(k))] for m in range(1 << k)]
    coeffs = _anf(table)
    gates = [Gate("H", (p,)) for p in pivots]
    for m, c in enumerate(coeffs):
        if not c or m == 0:
            continue
        on = [pivots[j] for j in range(k) if m >> j & 1]
        if len(on) == 1:
            gates.append(Gate("Z", (on[0],)))
        elif len(on) == 2:
            gates.append(Gate("CZ", tuple(on)))
        else:
            raise ValueError("sign pattern is not quadratic")
    for r, p in zip(rows, pivots):
        for q in range(1, n + 1):
            if q != p and r >> (n - q) & 1:
                gates.append(Gate("CNOT", (p, q)))
    gates += [Gate("X", (q,)) for q in range(1, n + 1) if offset >> (n - q) & 1]
    return Circuit(n, tuple(gates))


def w_circuit(n: int) -> Circuit:
    """Cascade of controlled ``RY`` rotations with ``cos(angle / 2) = 1 / sqrt(m)``."""
    if n < 2:
        raise ValueError("W state needs at least 2 particles")
    gates = [Gate("X", (1,))]
    for k in range(1, n):
        m = n - k + 1
        gates.append(Gate("CRY", (k, k + 1), f"2*acos(sqrt(1/{m}))"))
        gates.append(Gate("CNOT", (k + 1, k)))
    return Circuit(n, tuple(gates))


SUPPORTED = {"bell", "bellprimed", "ghz", "w", "zeta", "phi4", "chi4", "chi4ord", "phi4prime",
             "rigolin4", "yeochua4", "psi5", "phi5", "varphi5", "brown5", "sigma5", "sigma5prime",
             "gvarphi", "gchi"}


def preparation_circuit(spec: StateSpec | str) -> Circuit:
    """A circuit preparing ``make_state(spec)`` from ``|0...0>``, checked by state equality."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    if spec.family not in SUPPORTED:
        raise ValueError(f"no preparation circuit for {spec.family}")
    target = make_state(spec)
    if spec.family == "w":
        circ = w_circuit(spec.num_particles)
    else:
        circ = stabilizer_like_circuit(target)
    if not equal_up_to_global_phase(run_circuit(circ), target):
        raise AssertionError(f"preparation circuit for {spec} does not reproduce the state")
    return circ
