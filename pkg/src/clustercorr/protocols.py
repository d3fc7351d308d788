"""Exact simulation of teleportation and dense coding through the catalog channels.

Teleportation registers put the message first: message particles ``1..N``,
then the channel particles.  For ``N = 2`` that is message on 1, 2 and
channel on 3..7, with Alice holding 3, 4, 5 (direct) or 3, 4 (controlled,
Charlie holds 7).  Measurements in non-computational bases are inner
products against the basis states.

Dense coding channels are five-particle states with Alice on 1, 2,
Charlie on 3 and Bob on 4, 5.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import networkx as nx
import numpy as np

from . import catalog
from .errors import NumericalError
from .qstate import StateVector, apply_pauli, partial_trace, von_neumann_entropy

FIDELITY_TOL = 1e-9
PROB_TOL = 1e-10

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_FACTORS = {"X": _X, "Z": _Z}
# single-particle correction candidates, each listed in application order
CORRECTION_CANDIDATES = ((), ("X",), ("Z",), ("X", "Z"))


# --- teleportation -----------------------------------------------------------


@dataclass(frozen=True)
class CorrectionOp:
    """Paulis applied to one receiver particle, in application order.

    ``("X", "Z")`` means ``sigma_z o sigma_x``: first ``X``, then ``Z``.
    """

    particle: int
    ops: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.ops) > 2 or any(o not in ("X", "Y", "Z") for o in self.ops):
            raise ValueError(f"bad correction {self.ops}")

    @property
    def label(self) -> str:
        return "I" if not self.ops else "".join(reversed(self.ops))

    def matrix(self) -> np.ndarray:
        m = np.eye(2, dtype=complex)
        for o in self.ops:
            m = (_FACTORS[o] if o != "Y" else 1j * _X @ _Z) @ m
        return m

    def __str__(self) -> str:
        return f"{self.label}{self.particle}"

    @classmethod
    def parse(cls, text: str) -> "CorrectionOp":
        """Inverse of ``str``: ``"ZX5"`` is ``X`` then ``Z`` on particle 5."""
        m = re.fullmatch(r"(I|[XYZ]{1,2})(\d+)", text)
        if not m:
            raise ValueError(f"bad correction {text!r}")
        ops = () if m.group(1) == "I" else tuple(reversed(m.group(1)))
        return cls(int(m.group(2)), ops)


@dataclass(frozen=True)
class TeleportOutcome:
    label: str
    probability: float
    corrections: tuple[CorrectionOp, ...]
    fidelity: float

    @property
    def identity(self) -> bool:
        return all(not c.ops for c in self.corrections)


@dataclass(frozen=True)
class TeleportReport:
    channel: str
    controlled: bool
    outcomes: tuple[TeleportOutcome, ...]
    overall_success: bool

    def outcome(self, label: str) -> TeleportOutcome:
        for o in self.outcomes:
            if o.label == label:
                return o
        raise KeyError(label)

    def to_json(self) -> dict:
        return {
            "channel": self.channel,
            "controlled": self.controlled,
            "overall_success": self.overall_success,
            "total_probability": float(sum(o.probability for o in self.outcomes)),
            "outcomes": [
                {
                    "label": o.label,
                    "probability": o.probability,
                    "corrections": [str(c) for c in o.corrections],
                    "fidelity": o.fidelity,
                }
                for o in self.outcomes
            ],
        }


@dataclass(frozen=True)
class _Layout:
    n_msg: int
    alice: tuple[int, ...]  # register particles projected onto the basis, in basis order
    bob: tuple[int, ...]
    charlie: int | None


def _layout(n: int, controlled: bool) -> _Layout:
    msg = tuple(range(1, n + 1))
    if controlled:
        alice = msg + tuple(range(n + 1, 2 * n + 1))
        return _Layout(n, alice, tuple(range(2 * n + 1, 3 * n + 1)), 3 * n + 1)
    alice = msg + tuple(range(n + 1, 2 * n + 2))
    return _Layout(n, alice, tuple(range(2 * n + 2, 3 * n + 2)), None)


def _branch_maps(channel: StateVector, lay: _Layout, basis: list[StateVector]) -> np.ndarray:
    """Linear maps from message to Bob's unnormalised state.

    Returns ``maps[i, c]`` of shape ``(2**len(bob), 2**n_msg)`` for basis
    member ``i`` and Charlie bit ``c`` (a single dummy ``c`` when uncontrolled).
    """
    k = lay.n_msg
    eye = np.eye(1 << k).reshape((1 << k,) + (2,) * k)
    joint = np.multiply.outer(eye, channel.tensor())  # axis 0 labels the message basis
    ch = [lay.charlie] if lay.charlie else []
    order = [0] + list(lay.alice) + ch + list(lay.bob)
    joint = np.transpose(joint, order).reshape(1 << k, 1 << len(lay.alice), 1 << len(ch), 1 << len(lay.bob))
    b = np.array([s.amplitudes for s in basis]).conj()
    return np.einsum("ia,macb->icbm", b, joint)


def _kron_all(ms) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in ms:
        out = np.kron(out, m)
    return out


def find_correction(k_map: np.ndarray, bob: tuple[int, ...], tol: float = 1e-9) -> tuple[CorrectionOp, ...]:
    """Search per-particle Pauli corrections ``C`` with ``C K`` proportional to the identity."""
    nb = len(bob)
    scale = np.linalg.norm(k_map) / math.sqrt(k_map.shape[1])
    if scale < tol:
        raise NumericalError("branch has zero probability")
    km = k_map / scale
    for combo in itertools.product(CORRECTION_CANDIDATES, repeat=nb):
        ops = [CorrectionOp(p, c) for p, c in zip(bob, combo)]
        m = _kron_all(o.matrix() for o in ops) @ km
        lam = m[0, 0]
        if abs(abs(lam) - 1) < tol and np.allclose(m, lam * np.eye(m.shape[0]), atol=tol):
            return tuple(ops)
    raise NumericalError("no single-particle Pauli correction recovers the message")


def _adapted_basis(channel: StateVector, lay: _Layout) -> list[StateVector]:
    """Projection basis matched to a channel whose receiver part is maximally mixed.

    With the channel written as ``2**(-N/2) sum_b |f_b>_A |b>_B`` the members
    are ``P_M (|O> +- V_A |O>) / sqrt 2`` where ``|O> = 2**(-N/2) sum_m |m>_M |f_m>_A``,
    ``P`` runs over message Paulis and ``V`` is a single-particle Pauli on
    Alice's side that maps the span of the ``f_b`` onto its complement.
    """
    n = lay.n_msg
    na = len(lay.alice) - n
    t = channel.amplitudes.reshape(1 << na, 1 << n) * math.sqrt(1 << n)  # columns f_b
    if not np.allclose(t.conj().T @ t, np.eye(1 << n), atol=1e-9):
        raise NumericalError("receiver part of the channel is not maximally mixed")
    omega = StateVector(t.T.reshape(-1) / math.sqrt(1 << n))
    v_label = None
    for q, ax in itertools.product(range(na), "xzy"):
        label = "I" * q + ax + "I" * (na - q - 1)
        moved = np.stack([apply_pauli(StateVector(t[:, b]), label) for b in range(1 << n)], axis=1)
        if np.max(np.abs(t.conj().T @ moved)) < 1e-9:
            v_label = "I" * n + label
            break
    if v_label is None:
        raise NumericalError("no single-particle Pauli separates the channel support")
    v_omega = apply_pauli(omega, v_label)
    members = []
    for p in itertools.product("Ixyz", repeat=n):
        pm = "".join(p) + "I" * na
        a = apply_pauli(omega, pm)
        b = apply_pauli(StateVector(v_omega), pm)
        for sign in (1, -1):
            members.append(StateVector((a + sign * b) / math.sqrt(2)))
    return members


def _projection_basis(n: int, controlled: bool, channel: StateVector) -> tuple[list[StateVector], str]:
    if controlled:
        if n == 2:
            return catalog.list_family("chi4"), "chi"
        return catalog.list_family("gchi", n), "chi"
    if n == 2:
        return catalog.list_family("phi5"), "Phi"
    return _adapted_basis(channel, _layout(n, False)), "B"


CORRECTION_DATA = "corrections_varphi5.json"


@lru_cache(maxsize=1)
def shipped_corrections() -> dict:
    """The generated five-particle correction tables shipped with the package."""
    text = resources.files("clustercorr").joinpath("data", CORRECTION_DATA).read_text(encoding="utf-8")
    return json.loads(text)


def generate_correction_data() -> dict:
    """Search every five-particle channel, direct and controlled; the content of the shipped file."""
    out = {}
    for mode, controlled in (("direct", False), ("controlled", True)):
        out[mode] = {str(i): _search_table(2, i, controlled)[1] for i in range(1, 33)}
    return out


@lru_cache(maxsize=128)
def _maps(n: int, channel_index: int, controlled: bool):
    channel = catalog.generalized_varphi(n, channel_index)
    lay = _layout(n, controlled)
    basis, name = _projection_basis(n, controlled, channel)
    maps = _branch_maps(channel, lay, basis)
    labels = [
        f"{name}({i + 1})" + (f",{c}" if controlled else "")
        for i in range(maps.shape[0])
        for c in range(maps.shape[1])
    ]
    return lay, labels, maps.reshape((-1,) + maps.shape[2:])


def _search_table(n: int, channel_index: int, controlled: bool):
    lay, labels, maps = _maps(n, channel_index, controlled)
    return lay, {lab: [str(c) for c in find_correction(k, lay.bob)] for lab, k in zip(labels, maps)}


@lru_cache(maxsize=128)
def _table(n: int, channel_index: int, controlled: bool):
    lay, labels, maps = _maps(n, channel_index, controlled)
    if n == 2:
        table = shipped_corrections()["controlled" if controlled else "direct"][str(channel_index)]
    else:
        table = _search_table(n, channel_index, controlled)[1]
    rows = tuple(
        (lab, k, tuple(CorrectionOp.parse(c) for c in table[lab])) for lab, k in zip(labels, maps)
    )
    return lay, rows


def correction_table(n: int = 2, channel_index: int = 10, controlled: bool = False) -> dict[str, list[str]]:
    """Outcome label to receiver corrections, e.g. ``{"Phi(1)": ["I6", "I7"], ...}``."""
    _, rows = _table(n, channel_index, controlled)
    return {label: [str(c) for c in corr] for label, _, corr in rows}


def write_correction_data(path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(generate_correction_data(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def _check_message(message: StateVector, n: int):
    if message.num_qubits != n:
        raise ValueError(f"message must have {n} qubits, got {message.num_qubits}")


def teleport_generalized(n: int, message: StateVector, channel_index: int = 10, controlled: bool = False) -> TeleportReport:
    """Teleport an ``n``-qubit message through the ``(2n+1)``-particle channel ``channel_index``.

    Direct: Alice projects the message and channel particles ``1..n+1`` onto
    a ``(2n+1)``-particle basis (the five-particle Phi set for ``n = 2``).
    Controlled: Alice projects the message and channel particles ``1..n``
    onto the ``2n``-particle chi set, Charlie measures the last channel
    particle in the computational basis.
    """
    if not 1 <= n or 2 * n + 1 > 11:
        raise ValueError("generalized teleportation supports 2N + 1 <= 11")
    if n < 2:
        raise ValueError("generalized teleportation needs N >= 2")
    _check_message(message, n)
    lay, rows = _table(n, channel_index, controlled)
    psi = message.amplitudes
    outcomes = []
    for label, k, corr in rows:
        out = k @ psi
        prob = float(np.vdot(out, out).real)
        fixed = _kron_all(c.matrix() for c in corr) @ out
        fid = float(abs(np.vdot(psi, fixed)) ** 2 / prob)
        outcomes.append(TeleportOutcome(label, prob, corr, min(1.0, fid)))
    total = sum(o.probability for o in outcomes)
    if abs(total - 1) > PROB_TOL:
        raise NumericalError(f"outcome probabilities sum to {total:.12g}")
    ok = all(o.fidelity >= 1 - FIDELITY_TOL for o in outcomes)
    name = f"varphi5:{channel_index}" if n == 2 else f"gvarphi:{n}:{channel_index}"
    return TeleportReport(name, controlled, tuple(outcomes), ok)


def teleport_direct(message: StateVector, channel_index: int = 10) -> TeleportReport:
    """Two-qubit teleportation through the five-particle varphi channel, projecting onto the Phi set."""
    _check_message(message, 2)
    if not 1 <= channel_index <= 32:
        raise ValueError("channel index must be 1..32")
    return teleport_generalized(2, message, channel_index, controlled=False)


def teleport_controlled(message: StateVector, channel_index: int = 10) -> TeleportReport:
    """Controlled two-qubit teleportation: chi set on particles 1..4, Charlie reads particle 7."""
    _check_message(message, 2)
    if not 1 <= channel_index <= 32:
        raise ValueError("channel index must be 1..32")
    return teleport_generalized(2, message, channel_index, controlled=True)


# --- direct dense coding ---------------------------------------------------

# Pauli labels on Alice's particles 1, 2, 3
DENSE_OPERATORS = (
    "III", "zII", "IzI", "IIz", "zzI", "zIz", "Izz", "zzz",
    "xII", "xzI", "xIz", "xzz", "IxI", "zxI", "Ixz", "zxz",
    "yII", "yzI", "yIz", "yzz", "IyI", "zyI", "Iyz", "zyz",
    "xxI", "xxz", "xyI", "xyz", "yxI", "yxz", "yyI", "yyz",
)


def dense_encode(channel_index: int, label: str) -> StateVector:
    """Apply Alice's Pauli encoding to particles 1..3 of the five-particle varphi channel."""
    if label not in DENSE_OPERATORS:
        raise ValueError(f"{label!r} is not one of the 32 encoding operators")
    return StateVector(apply_pauli(catalog.varphi5(channel_index), label + "II"))


def dense_decode(state: StateVector, channel_index: int) -> str:
    """Bob's joint measurement: the encoding whose state has unit overlap with ``state``."""
    for label in DENSE_OPERATORS:
        if abs(abs(np.vdot(dense_encode(channel_index, label).amplitudes, state.amplitudes)) - 1) < 1e-9:
            return label
    raise NumericalError("state matches no encoding")


def dense_gram(channel_index: int = 1) -> np.ndarray:
    """Gram matrix of the 32 encoded states."""
    states = np.array([dense_encode(channel_index, lab).amplitudes for lab in DENSE_OPERATORS])
    return states.conj() @ states.T


def channel_capacity(channel, alice_particles) -> float:
    """``log2 D_A + S(rho_B) - S(rho_AB)`` in bits."""
    alice = sorted(set(int(p) for p in alice_particles))
    n = channel.num_qubits
    if not alice or any(not 1 <= p <= n for p in alice):
        raise ValueError("Alice's particles must be a nonempty subset of 1..n")
    bob = [p for p in range(1, n + 1) if p not in alice]
    s_b = von_neumann_entropy(partial_trace(channel, bob)) if bob else 0.0
    s_ab = von_neumann_entropy(channel)
    return len(alice) + s_b - s_ab


# --- controlled dense coding -----------------------------------------------

DENSE_CHANNELS = {
    "psi5": lambda: catalog.psi5(1),
    "phi5": lambda: catalog.phi5(1),
    "varphi5": lambda: catalog.varphi5(10),
    "ghz5": lambda: catalog.ghz(5, 1),
}
_ALIASES = {"psi5_1": "psi5", "phi5_1": "phi5", "varphi5_10": "varphi5"}
TWO_QUBIT_PAULIS = tuple(a + b for a in "Ixyz" for b in "Ixyz")
THETA_REF = math.pi / 8


def normalize_theta(theta: float) -> float:
    """Fold ``theta`` in ``[0, pi/2]`` onto ``[0, pi/4]`` by ``theta -> pi/2 - theta``."""
    if not -1e-12 <= theta <= math.pi / 2 + 1e-12:
        raise ValueError(f"theta {theta} outside [0, pi/2]")
    theta = min(max(theta, 0.0), math.pi / 2)
    return math.pi / 2 - theta if theta > math.pi / 4 else theta


def charlie_basis(theta: float) -> tuple[StateVector, StateVector]:
    """``|x1> = cos t |0> + sin t |1>``, ``|x2> = sin t |0> - cos t |1>`` with ``t`` folded onto ``[0, pi/4]``."""
    t = normalize_theta(theta)
    c, s = math.cos(t), math.sin(t)
    return StateVector([c, s]), StateVector([s, -c])


def filter_unitary(theta: float, blocks) -> np.ndarray:
    """Unitary on ``(q1, q2, aux)``, index ``4 q1 + 2 q2 + aux``.

    Each listed ``(q1, q2)`` pair gets the block ``[[t, r], [r, -t]]`` with
    ``t = tan theta`` and ``r = sqrt(1 - t**2)``; other pairs are untouched.
    """
    t = math.tan(normalize_theta(theta))
    r = math.sqrt(max(0.0, 1 - t * t))
    u = np.eye(8, dtype=complex)
    for a in blocks:
        i = 2 * a
        u[i : i + 2, i : i + 2] = [[t, r], [r, -t]]
    return u


def u_first(theta: float) -> np.ndarray:
    """Alice's filter after Charlie's ``|x1>``: blocks on ``|00>`` and ``|11>``."""
    return filter_unitary(theta, (0b00, 0b11))


def u_second(theta: float) -> np.ndarray:
    """Alice's filter after Charlie's ``|x2>``: blocks on ``|01>`` and ``|10>``."""
    return filter_unitary(theta, (0b01, 0b10))


# Bob's two-qubit unitary on Alice's particle 1 and his particle 5
U_A1B5 = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, 0], [1, 0, 0, -1]]) / math.sqrt(2)


@dataclass(frozen=True)
class DenseBranch:
    charlie: str
    probability: float
    blocks: tuple[int, ...]
    aux_probs: tuple[float, float]
    bits: tuple[float, float]
    decoded: bool


@dataclass(frozen=True)
class DenseReport:
    channel: str
    theta: float
    interface: str
    aux_outcome_probs: dict
    average_bits: float
    branches: tuple[DenseBranch, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "channel": self.channel,
            "theta": self.theta,
            "interface": self.interface,
            "aux_outcome_probs": self.aux_outcome_probs,
            "average_bits": self.average_bits,
            "branches": [
                {
                    "charlie": b.charlie,
                    "probability": b.probability,
                    "blocks": [format(a, "02b") for a in b.blocks],
                    "aux_probs": list(b.aux_probs),
                    "bits": list(b.bits),
                    "decoded": b.decoded,
                }
                for b in self.branches
            ],
        }


def _channel(kind: str) -> tuple[str, StateVector]:
    key = _ALIASES.get(kind.lower(), kind.lower())
    if key not in DENSE_CHANNELS:
        raise ValueError(f"unknown dense-coding channel {kind!r}; choose from {', '.join(DENSE_CHANNELS)}")
    return key, DENSE_CHANNELS[key]()


def _charlie_branches(channel: StateVector, theta: float):
    """Charlie's outcomes: ``(name, probability, normalised state on 1, 2, 4, 5)``."""
    t = channel.tensor()
    out = []
    for name, x in zip(("x1", "x2"), charlie_basis(theta)):
        v = np.tensordot(t, x.amplitudes.conj(), axes=([2], [0])).reshape(-1)
        p = float(np.vdot(v, v).real)
        out.append((name, p, v / math.sqrt(p) if p > 1e-14 else None))
    return out


def _alice_weights(v: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(v.reshape(4, 4)) ** 2, axis=1)


def _filter_blocks(weights_ref: np.ndarray, tol: float = 1e-9) -> tuple[int, ...]:
    """Alice pairs to attenuate: the ones heavier than the lightest occupied pair."""
    occupied = weights_ref[weights_ref > tol]
    low = occupied.min()
    return tuple(a for a in range(4) if weights_ref[a] > low + tol)


def _apply_filter(v: np.ndarray, theta: float, blocks) -> tuple[list[float], list[np.ndarray | None]]:
    """Attach ``|0>_aux`` to Alice's pair, filter, measure aux; returns probabilities and normalised states."""
    u = filter_unitary(theta, blocks)
    t = v.reshape(4, 4)  # (alice pair, bob pair)
    joint = np.zeros((8, 4), dtype=complex)
    joint[0::2] = t  # aux = 0 sits at even indices
    joint = u @ joint
    probs, states = [], []
    for aux in (0, 1):
        part = joint[aux::2].reshape(-1)
        p = float(np.vdot(part, part).real)
        probs.append(p)
        states.append(part / math.sqrt(p) if p > 1e-14 else None)
    return probs, states


def _encode2(v: np.ndarray, label: str) -> np.ndarray:
    return apply_pauli(StateVector(v), label + "II")


def encodable_bits(v: np.ndarray) -> float:
    """``log2`` of the largest set of mutually orthogonal two-qubit Pauli encodings of ``v``."""
    states = [_encode2(v, p) for p in TWO_QUBIT_PAULIS]
    g = nx.Graph()
    g.add_nodes_from(range(16))
    for i, j in itertools.combinations(range(16), 2):
        if abs(np.vdot(states[i], states[j])) < 1e-9:
            g.add_edge(i, j)
    _, size = nx.max_weight_clique(g, weight=None)
    bits = math.log2(size)
    cap = channel_capacity(StateVector(v), [1, 2])
    if abs(cap - bits) > 1e-6:
        raise NumericalError(f"orthogonal encodings give {bits} bits but capacity is {cap}")
    return bits


def _classes(states: dict[str, np.ndarray], tol: float = 1e-9) -> list[list[str]]:
    """Group states equal up to phase; the groups must be mutually orthogonal."""
    groups: list[tuple[np.ndarray, list[str]]] = []
    for label, s in states.items():
        for rep, members in groups:
            ov = abs(np.vdot(rep, s))
            if ov > 1 - tol:
                members.append(label)
                break
            if ov > tol:
                raise NumericalError("encoded states are neither equal nor orthogonal")
        else:
            groups.append((s, [label]))
    return [m for _, m in groups]


def _cnot(v: np.ndarray, control: int, target: int) -> np.ndarray:
    """CNOT on a four-qubit vector with 0-based axis positions."""
    t = v.reshape((2,) * 4).copy()
    idx = [slice(None)] * 4
    idx[control] = 1
    sub = t[tuple(idx)]
    tgt = target - (1 if target > control else 0)
    t[tuple(idx)] = np.flip(sub, axis=tgt)
    return t.reshape(-1)


def _ghz4_basis() -> np.ndarray:
    return np.array([catalog.ghz(4, k).amplitudes for k in range(1, 17)])


def _decode_joint(v: np.ndarray, labels) -> bool:
    """Joint measurement on the encodings; every label must land in its own orthogonal class."""
    groups = _classes({p: _encode2(v, p) for p in labels})
    return len(groups) == len(list(labels))


def _decode_ghz(v: np.ndarray, labels) -> bool:
    """``U_A1B5`` on particles 1 and 5, then a measurement in the four-qubit GHZ basis."""
    basis = _ghz4_basis()
    # register order is (1, 2, 4, 5); U acts on axes 0 and 3
    u = U_A1B5.reshape(2, 2, 2, 2)
    seen = set()
    for p in labels:
        t = _encode2(v, p).reshape((2,) * 4)
        t = np.einsum("abcd,cd...->ab...", u, np.moveaxis(t, [0, 3], [0, 1]))
        t = np.moveaxis(t, [0, 1], [0, 3]).reshape(-1)
        ov = np.abs(basis.conj() @ t)
        k = int(np.argmax(ov))
        if abs(ov[k] - 1) > 1e-9 or k in seen:
            return False
        seen.add(k)
    return True


def _run_ca(v: np.ndarray, v_ref: np.ndarray, theta: float):
    blocks = _filter_blocks(_alice_weights(v_ref))
    probs, states = _apply_filter(v, theta, blocks)
    bits, decoded = [], True
    for p, s in zip(probs, states):
        if s is None:
            bits.append(0.0)
            continue
        b = encodable_bits(s)
        bits.append(b)
        if b == 4:
            decoded &= _decode_ghz(s, TWO_QUBIT_PAULIS) or _decode_joint(s, TWO_QUBIT_PAULIS)
    return blocks, probs, bits, decoded


def _bob_readout(v: np.ndarray):
    """Bob's CNOTs (1 -> 5, 2 -> 4), then the computational readout of 4, 5 if it is sharp."""
    w = _cnot(_cnot(v, 0, 3), 1, 2).reshape(4, 4)
    bob_w = np.sum(np.abs(w) ** 2, axis=0)
    hits = np.flatnonzero(bob_w > 1e-12)
    if len(hits) != 1:
        return None, None
    r = int(hits[0])
    return r, w[:, r] / np.linalg.norm(w[:, r])


def _run_cb(v: np.ndarray, v_ref: np.ndarray, theta: float):
    """Bob holds all four qubits and Charlie's outcome; Alice encodes without filtering."""
    readouts: dict[int, list[str]] = {}
    for p in TWO_QUBIT_PAULIS:
        r, _ = _bob_readout(_encode2(v, p))
        if r is None:
            return _run_cb_joint(v, v_ref, theta)
        readouts.setdefault(r, []).append(p)
    probs_acc = np.zeros(2)
    bits_acc = np.zeros(2)
    blocks_seen = set()
    decoded = True
    for r, labels in sorted(readouts.items()):
        pair = {p: _bob_readout(_encode2(v, p))[1] for p in labels}
        pair_ref = _bob_readout(_encode2(v_ref, labels[0]))[1]
        blocks = _filter_blocks(np.abs(pair_ref) ** 2)
        blocks_seen.update(blocks)
        u = filter_unitary(theta, blocks)
        after = {}
        for p, s in pair.items():
            joint = np.zeros(8, dtype=complex)
            joint[0::2] = s
            after[p] = u @ joint
        weight = len(labels) / 16
        for aux in (0, 1):
            parts = {p: a[aux::2] for p, a in after.items()}
            pa = float(np.mean([np.vdot(x, x).real for x in parts.values()]))
            probs_acc[aux] += weight * pa
            if pa < 1e-14:
                continue
            groups = _classes({p: x / np.linalg.norm(x) for p, x in parts.items()})
            # the readout fixes the subset (log2 of the number of subsets), the aux branch the rest
            bits_acc[aux] += weight * pa * (math.log2(len(readouts)) + math.log2(len(groups)))
            decoded &= all(any(p in g for g in groups) for p in labels)
    probs = [float(x) for x in probs_acc]
    bits = [float(bits_acc[a] / probs_acc[a]) if probs_acc[a] > 1e-14 else 0.0 for a in (0, 1)]
    return tuple(sorted(blocks_seen)), probs, bits, decoded


def _run_cb_joint(v: np.ndarray, v_ref: np.ndarray, theta: float):
    """Fallback when the CNOT readout is not sharp: Bob discriminates the 16 encodings jointly."""
    states = {p: _encode2(v, p) for p in TWO_QUBIT_PAULIS}
    groups = _classes(states)
    return (), [1.0, 0.0], [math.log2(len(groups)), 0.0], True


def controlled_dense_run(channel_kind: str, theta: float, interface: str = "C-A") -> DenseReport:
    """Controlled dense coding with Charlie measuring particle 3 in the ``theta`` basis.

    ``C-A``: Charlie tells Alice, who filters with an auxiliary qubit before
    encoding.  ``C-B``: Charlie tells Bob, who applies two CNOTs, reads his
    qubits and filters Alice's pair with an auxiliary qubit.  Filter blocks
    are the Alice pairs carrying the larger weight in the Charlie branch.
    """
    key, channel = _channel(channel_kind)
    iface = interface.upper().replace("_", "-")
    if iface in ("CA", "CB"):
        iface = iface[0] + "-" + iface[1]
    if iface not in ("C-A", "C-B"):
        raise ValueError("interface must be C-A or C-B")
    t = normalize_theta(theta)
    ref = _charlie_branches(channel, THETA_REF)
    branches = []
    total = 0.0
    aux_tot = np.zeros(2)
    for (name, p, v), (_, _, v_ref) in zip(_charlie_branches(channel, t), ref):
        if v is None:
            continue
        run = _run_ca if iface == "C-A" else _run_cb
        blocks, probs, bits, decoded = run(v, v_ref, t)
        if abs(sum(probs) - 1) > 1e-12:
            raise NumericalError(f"aux probabilities sum to {sum(probs):.15g}")
        branches.append(DenseBranch(name, p, blocks, tuple(probs), tuple(bits), decoded))
        total += p * (probs[0] * bits[0] + probs[1] * bits[1])
        aux_tot += p * np.array(probs)
    if not all(b.decoded for b in branches):
        raise AssertionError("a decoded message differs from the encoded one")
    return DenseReport(
        channel=key,
        theta=float(theta),
        interface=iface,
        aux_outcome_probs={"0": float(aux_tot[0]), "1": float(aux_tot[1])},
        average_bits=float(total),
        branches=tuple(branches),
    )


def direct_dense_run(channel_index: int = 1) -> DenseReport:
    """Direct dense coding with Alice holding particles 1..3: encode and decode every label."""
    if not 1 <= channel_index <= 32:
        raise ValueError("channel index must be 1..32")
    for label in DENSE_OPERATORS:
        if dense_decode(dense_encode(channel_index, label), channel_index) != label:
            raise AssertionError(f"{label} decoded incorrectly")
    g = dense_gram(channel_index)
    if not np.allclose(g, np.eye(len(DENSE_OPERATORS)), atol=1e-10):
        raise NumericalError("encoded states are not orthonormal")
    bits = math.log2(len(DENSE_OPERATORS))
    branch = DenseBranch("none", 1.0, (), (1.0, 0.0), (bits, 0.0), True)
    return DenseReport(f"varphi5:{channel_index}", 0.0, "direct", {"0": 1.0, "1": 0.0}, bits, (branch,))


def info_sweep(channel_kinds, theta_grid, interface: str = "C-A") -> list[tuple[str, float, float, float, float]]:
    """Rows ``(channel, theta, avg_bits, p_aux0, p_aux1)`` over the grid."""
    rows = []
    for kind in channel_kinds:
        for th in theta_grid:
            r = controlled_dense_run(kind, th, interface)
            rows.append((r.channel, float(th), r.average_bits, r.aux_outcome_probs["0"], r.aux_outcome_probs["1"]))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["channel", "theta", "avg_bits", "p_aux0", "p_aux1"])
    for kind, th, bits, p0, p1 in rows:
        w.writerow([kind] + [f"{x:.12g}" for x in (th, bits, p0, p1)])
    return buf.getvalue()
