"""Ursell-Mayer cluster coefficients: joint cumulants of single-particle Pauli observables.

For a Pauli string ``p`` with no identity axis the cluster coefficient is

    C_p = sum over set partitions pi of the particles of
          (-1)**(|pi|-1) * (|pi|-1)! * prod_{B in pi} <prod_{i in B} sigma_i>

It vanishes whenever the particles split into two uncorrelated groups, which
is what makes the full table of coefficients (the *signature*) a fingerprint
of genuine multi-particle correlation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import factorial
from typing import Iterator, Sequence

import numpy as np

from .qstate import (
    PauliString,
    State,
    StateVector,
    as_pauli,
    expectation,
    pauli_expectations,
    permute_pauli,
)

NONZERO_TOL = 1e-8
MAX_SCAN_PARTICLES = 8
MAX_SEARCH_PARTICLES = 6


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """Yield every set partition of ``items`` (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]


def _check_full_weight(state: State, p) -> PauliString:
    p = as_pauli(p)
    if len(p) != state.num_qubits:
        raise ValueError(f"Pauli string {p} does not match {state.num_qubits} particles")
    if "I" in p.axes:
        raise ValueError(
            f"cluster coefficient needs a non-identity axis on every particle, got {p}; "
            "reduce the state to the sub-register first"
        )
    return p


def _substring(p: PauliString, block) -> str:
    return "".join(a if k in block else "I" for k, a in enumerate(p.axes))


def cumulant(state: State, p) -> float:
    """Joint cumulant of the single-particle observables named by ``p``.

    Evaluated literally from the set-partition sum, with every block moment
    computed by :func:`~clustercorr.qstate.expectation`.
    """
    p = _check_full_weight(state, p)
    n = len(p)
    moments: dict[frozenset, float] = {}

    def moment(block) -> float:
        key = frozenset(block)
        if key not in moments:
            moments[key] = expectation(state, _substring(p, key))
        return moments[key]

    total = 0.0
    for part in set_partitions(range(n)):
        k = len(part)
        term = (-1) ** (k - 1) * factorial(k - 1)
        for block in part:
            term *= moment(block)
        total += term
    return float(total)


def closed_form_cumulant(state: State, p) -> float:
    """Cluster coefficient from the explicit two- to five-particle expansions.

    The four- and five-particle forms are written the way they are usually
    printed: recursively, subtracting single-particle means times the
    lower-order coefficients of the remaining particles.  Kept separate from
    :func:`cumulant` so each can check the other.
    """
    p = _check_full_weight(state, p)
    n = len(p)
    if n not in (2, 3, 4, 5):
        raise ValueError(f"closed forms exist for 2 to 5 particles, not {n}")

    cache: dict[tuple, float] = {}

    def m(*parts: int) -> float:
        key = tuple(sorted(parts))
        if key not in cache:
            cache[key] = expectation(state, _substring(p, {k - 1 for k in key}))
        return cache[key]

    def c2(a, b):
        return m(a, b) - m(a) * m(b)

    def c3(a, b, c):
        return (
            m(a, b, c)
            - m(a) * m(b, c)
            - m(b) * m(a, c)
            - m(c) * m(a, b)
            + 2 * m(a) * m(b) * m(c)
        )

    def c4(a, b, c, d):
        return (
            m(a, b, c, d)
            - m(a) * c3(b, c, d)
            - m(b) * c3(a, c, d)
            - m(c) * c3(a, b, d)
            - m(d) * c3(a, b, c)
            - m(a, b) * m(c, d)
            - m(a, c) * m(b, d)
            - m(a, d) * m(b, c)
            + 2 * m(a) * m(b) * m(c) * m(d)
        )

    def c5(a, b, c, d, e):
        return (
            m(a, b, c, d, e)
            - m(a) * c4(b, c, d, e)
            - m(b) * c4(a, c, d, e)
            - m(c) * c4(a, b, d, e)
            - m(d) * c4(a, b, c, e)
            - m(e) * c4(a, b, c, d)
            - m(a, b) * m(c, d, e)
            - m(a, c) * m(b, d, e)
            - m(a, d) * m(b, c, e)
            - m(a, e) * m(b, c, d)
            - m(b, c) * m(a, d, e)
            - m(b, d) * m(a, c, e)
            - m(b, e) * m(a, c, d)
            - m(c, d) * m(a, b, e)
            - m(c, e) * m(a, b, d)
            - m(d, e) * m(a, b, c)
            + m(a) * m(b, c) * m(d, e)
            + m(a) * m(b, d) * m(c, e)
            + m(a) * m(b, e) * m(c, d)
            + m(b) * m(a, c) * m(d, e)
            + m(b) * m(a, d) * m(c, e)
            + m(b) * m(a, e) * m(c, d)
            + m(c) * m(a, b) * m(d, e)
            + m(c) * m(a, d) * m(b, e)
            + m(c) * m(a, e) * m(b, d)
            + m(d) * m(a, b) * m(c, e)
            + m(d) * m(a, c) * m(b, e)
            + m(d) * m(a, e) * m(b, c)
            + m(e) * m(a, b) * m(c, d)
            + m(e) * m(a, c) * m(b, d)
            + m(e) * m(a, d) * m(b, c)
            - 6 * m(a) * m(b) * m(c) * m(d) * m(e)
        )

    forms = {2: c2, 3: c3, 4: c4, 5: c5}
    return float(forms[n](*range(1, n + 1)))


def cumulant_tensor(state: State) -> np.ndarray:
    """Cluster coefficients for every string in ``{x, y, z}**n`` at once.

    Returns an array of shape ``(3,) * n`` indexed by axis ``x=0, y=1, z=2``.
    Uses the moment-to-cumulant recursion over subsets,
    ``k(S) = m(S) - sum_{B < S, min S in B} k(B) m(S \\ B)``,
    on the full Pauli expectation tensor.
    """
    n = state.num_qubits
    t = pauli_expectations(state)

    def moment(mask: int) -> np.ndarray:
        index = tuple(slice(1, 4) if mask >> (n - 1 - k) & 1 else 0 for k in range(n))
        sub = t[index]
        shape = tuple(3 if mask >> (n - 1 - k) & 1 else 1 for k in range(n))
        return sub.reshape(shape)

    moments = {mask: moment(mask) for mask in range(1, 1 << n)}
    kappa: dict[int, np.ndarray] = {}
    for mask in sorted(moments, key=lambda s: bin(s).count("1")):
        low = mask & -mask
        rest = mask ^ low
        acc = moments[mask]
        sub = rest
        # proper sub-blocks containing the lowest set bit
        while sub:
            sub = (sub - 1) & rest
            block = low | sub
            if block != mask:
                acc = acc - kappa[block] * moments[mask ^ block]
        kappa[mask] = acc
    return np.broadcast_to(kappa[(1 << n) - 1], (3,) * n).copy()


@dataclass(frozen=True)
class CorrelationSignature:
    """Nonvanishing cluster coefficients of a state, keyed by axis string."""

    num_particles: int
    entries: dict[str, float] = field(default_factory=dict)
    tolerance: float = NONZERO_TOL

    def __post_init__(self):
        for key, value in self.entries.items():
            if len(key) != self.num_particles or set(key) - set("xyz"):
                raise ValueError(f"bad signature key {key!r}")
            if abs(value) <= self.tolerance:
                raise ValueError(f"signature entry {key}={value} is below tolerance")

    @property
    def keys(self) -> frozenset[str]:
        return frozenset(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: str, default: float = 0.0) -> float:
        return self.entries.get(key, default)

    def to_json(self) -> dict:
        return {
            "num_particles": self.num_particles,
            "tolerance": self.tolerance,
            "entries": {k: self.entries[k] for k in sorted(self.entries)},
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "CorrelationSignature":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            int(data["num_particles"]),
            {str(k): float(v) for k, v in data["entries"].items()},
            float(data.get("tolerance", NONZERO_TOL)),
        )

    def format(self) -> str:
        lines = [f"{len(self)} nonzero cluster coefficients ({self.num_particles} particles)"]
        for key in sorted(self.entries):
            lines.append(f"  C_{key} = {self.entries[key]:+.10g}")
        return "\n".join(lines)


def correlation_tensor(state: State, tol: float = NONZERO_TOL) -> CorrelationSignature:
    """Scan all ``3**n`` full-weight strings and keep coefficients above ``tol``."""
    n = state.num_qubits
    if not 2 <= n <= MAX_SCAN_PARTICLES:
        raise ValueError(f"signature scan supports 2..{MAX_SCAN_PARTICLES} particles, got {n}")
    kappa = cumulant_tensor(state)
    entries = {}
    for code in zip(*np.nonzero(np.abs(kappa) > tol)):
        key = "".join("xyz"[c] for c in code)
        entries[key] = float(kappa[code])
    return CorrelationSignature(n, dict(sorted(entries.items())), tol)


_HADAMARD_AXIS = {"x": "z", "y": "y", "z": "x"}


def hadamard_signature_map(sig: CorrelationSignature, particle: int) -> CorrelationSignature:
    """Signature of the state after a Hadamard on ``particle`` (1-based).

    ``H x H = z``, ``H z H = x`` and ``H y H = -y``; the cumulant is linear in
    each observable, so keys swap ``x <-> z`` at that position and values flip
    sign exactly when the axis there is ``y``.
    """
    if not 1 <= particle <= sig.num_particles:
        raise ValueError(f"particle {particle} out of range 1..{sig.num_particles}")
    k = particle - 1
    entries = {}
    for key, value in sig.entries.items():
        axis = key[k]
        new_key = key[:k] + _HADAMARD_AXIS[axis] + key[k + 1 :]
        entries[new_key] = -value if axis == "y" else value
    return CorrelationSignature(sig.num_particles, dict(sorted(entries.items())), sig.tolerance)


def permute_signature(sig: CorrelationSignature, perm: Sequence[int]) -> CorrelationSignature:
    """Signature of the particle-relabelled state (same convention as ``permute_particles``)."""
    entries = {permute_pauli(k, perm).axes: v for k, v in sig.entries.items()}
    return CorrelationSignature(sig.num_particles, dict(sorted(entries.items())), sig.tolerance)


def _magnitudes(sig: CorrelationSignature, digits: int = 7) -> dict[str, float]:
    return {k: round(abs(v), digits) for k, v in sig.entries.items()}


def signatures_match(a: CorrelationSignature, b: CorrelationSignature, tol: float = 1e-7) -> bool:
    """Same key set and the same ``|value|`` per key; signs are ignored."""
    if a.keys != b.keys:
        return False
    return all(abs(abs(a.entries[k]) - abs(b.entries[k])) <= tol for k in a.keys)


@dataclass(frozen=True)
class FamilyRelation:
    verdict: str
    permutation: tuple[int, ...] | None = None
    hadamards: tuple[int, ...] = ()
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "permutation": list(self.permutation) if self.permutation else None,
            "hadamards": list(self.hadamards),
            "detail": self.detail,
        }


VERDICTS = (
    "same-state-up-to-tolerance",
    "permutation-related",
    "hadamard-related",
    "same-family-candidate",
    "different-family",
)


def apply_witness(sig: CorrelationSignature, hadamards: Sequence[int], perm: Sequence[int]) -> CorrelationSignature:
    """Hadamards on the listed particles first, then the particle relabelling."""
    for k in hadamards:
        sig = hadamard_signature_map(sig, k)
    return permute_signature(sig, perm)


def _axis_counts(sig: CorrelationSignature) -> list[tuple[int, int, int]]:
    return sorted((k.count("x"), k.count("y"), k.count("z")) for k in sig.keys)


def _permutations_by_support(n: int):
    """All permutations of 1..n, fewest moved particles first."""
    perms = list(itertools.permutations(range(1, n + 1)))
    return sorted(perms, key=lambda p: (sum(1 for i, v in enumerate(p, 1) if i != v), p))


def classify(
    a: CorrelationSignature,
    b: CorrelationSignature,
    max_search_particles: int = MAX_SEARCH_PARTICLES,
) -> FamilyRelation:
    """Relate two signatures by the nonzero-count, permutation and Hadamard rules.

    Decision ladder: differing nonzero counts mean different families; then a
    search over particle permutations composed with Hadamard subsets (skipped
    above ``max_search_particles``) looks for a witness mapping one onto the
    other; failing that, matching per-key axis-count multisets leave the pair
    as a same-family candidate.
    """
    if a.num_particles != b.num_particles:
        raise ValueError("signatures have different particle counts")
    n = a.num_particles
    if len(a) != len(b):
        return FamilyRelation(
            "different-family", detail=f"{len(a)} vs {len(b)} nonzero coefficients"
        )
    if signatures_match(a, b):
        return FamilyRelation("same-state-up-to-tolerance", tuple(range(1, n + 1)))
    if n <= max_search_particles:
        perms = _permutations_by_support(n)
        for perm in perms:
            if signatures_match(permute_signature(a, perm), b):
                return FamilyRelation("permutation-related", perm)
        subsets = [
            combo for size in range(1, n + 1) for combo in itertools.combinations(range(1, n + 1), size)
        ]
        for hs in subsets:
            mapped = apply_witness(a, hs, range(1, n + 1))
            for perm in perms:
                if signatures_match(permute_signature(mapped, perm), b):
                    return FamilyRelation("hadamard-related", perm, hs)
    if _axis_counts(a) == _axis_counts(b):
        return FamilyRelation("same-family-candidate", detail="axis-count multisets agree")
    return FamilyRelation("different-family", detail="no witness and axis-count multisets differ")
