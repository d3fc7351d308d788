"""Constructors for the named entangled-state families.

Stacked families are written as ``(1/sqrt 2)[A_r (x) ... + s B_r (x) ...]`` where
each factor is a column of alternatives and the row ``r`` of every column is
chosen independently.  Member index ``i`` (1-based) enumerates the row
choices row-major in the order the columns appear, with the relative sign
``+`` before ``-`` as the fastest digit.  The ``Chi4`` set in the order used
to build the five-particle channel (``chi4ord``) is the one exception; its
order is fixed explicitly, see :func:`chi_ordered`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np

from .qstate import StateVector, permute_particles, tensor_product

R2 = 1 / sqrt(2)

KET0 = StateVector([1, 0])
KET1 = StateVector([0, 1])

BELL = {
    "phi+": StateVector.from_terms({"00": 1, "11": 1}),
    "phi-": StateVector.from_terms({"00": 1, "11": -1}),
    "psi+": StateVector.from_terms({"01": 1, "10": 1}),
    "psi-": StateVector.from_terms({"01": 1, "10": -1}),
}
BELL_ORDER = ("phi+", "phi-", "psi+", "psi-")

# Hadamard on particle 2 of the Bell states
BELL_PRIMED = {
    "phi'+": StateVector.from_terms({"00": 1, "01": 1, "10": 1, "11": -1}),
    "phi'-": StateVector.from_terms({"00": 1, "01": 1, "10": -1, "11": 1}),
    "psi'+": StateVector.from_terms({"00": 1, "01": -1, "10": 1, "11": 1}),
    "psi'-": StateVector.from_terms({"00": 1, "01": -1, "10": -1, "11": -1}),
}
BELL_PRIMED_ORDER = ("phi'+", "phi'-", "psi'+", "psi'-")

FAMILIES = {
    "bell": "Bell",
    "bellprimed": "BellPrimed",
    "ghz": "GHZ",
    "w": "W",
    "zeta": "Zeta",
    "phi4": "Phi4",
    "chi4": "Chi4",
    "chi4ord": "Chi4Ordered",
    "phi4prime": "Phi4Prime",
    "rigolin4": "Rigolin4",
    "yeochua4": "YeoChua4",
    "psi5": "Psi5",
    "phi5": "Phi5",
    "varphi5": "Varphi5",
    "brown5": "Brown5",
    "sigma5": "Sigma5",
    "sigma5prime": "Sigma5Prime",
    "gvarphi": "GeneralizedVarphi",
    "gchi": "GeneralizedChi",
}


@dataclass(frozen=True)
class StateSpec:
    """A catalog member: family name, 1-based index, and size where the family is size-parametric."""

    family: str
    index: int = 1
    num_particles: int | None = None

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; known: {', '.join(sorted(FAMILIES))}")
        object.__setattr__(self, "family", fam)
        lo, hi = index_range(self)
        if not lo <= self.index <= hi:
            raise ValueError(f"{fam} index {self.index} outside {lo}..{hi}")

    def __str__(self) -> str:
        if self.family in _SIZED:
            return f"{self.family}:{self.num_particles}:{self.index}"
        return f"{self.family}:{self.index}"


_SIZED = {"ghz", "w", "gvarphi", "gchi"}
_DEFAULT_SIZE = {"ghz": 3, "w": 3, "gvarphi": 2, "gchi": 2}


def index_range(spec: StateSpec) -> tuple[int, int]:
    fam = spec.family
    n = spec.num_particles
    if fam in _SIZED:
        if n is None:
            object.__setattr__(spec, "num_particles", _DEFAULT_SIZE[fam])
            n = spec.num_particles
        if fam == "ghz":
            if not 2 <= n <= 12:
                raise ValueError("GHZ size must be 2..12")
            return 1, 2**n
        if fam == "w":
            if not 2 <= n <= 12:
                raise ValueError("W size must be 2..12")
            return 1, 1
        # generalized sets are parametrised by N; gvarphi has 2N+1 particles, gchi 2N
        if not 1 <= n <= 6:
            raise ValueError("generalized sets support N = 1..6")
        if fam == "gvarphi":
            if n < 2:
                raise ValueError("generalized varphi needs N >= 2")
            return 1, 2 ** (2 * n + 1)
        return 1, 2 ** (2 * n)
    sizes = {
        "bell": 4, "bellprimed": 4, "zeta": 8, "phi4": 16, "chi4": 16, "chi4ord": 16,
        "phi4prime": 16, "rigolin4": 16, "yeochua4": 1, "psi5": 32, "phi5": 32,
        "varphi5": 32, "brown5": 1, "sigma5": 1, "sigma5prime": 1,
    }
    return 1, sizes[fam]


_SPEC_RE = re.compile(r"^([a-z0-9]+)(?::([^:]+))?(?::([^:]+))?$")


def parse_spec(text: str) -> StateSpec:
    """Parse CLI names such as ``varphi5:10``, ``ghz:3:1``, ``w:5`` or ``bell:psi-``."""
    m = _SPEC_RE.match(text.strip().lower())
    if not m:
        raise ValueError(f"cannot parse state spec {text!r}")
    fam, a, b = m.groups()
    if fam not in FAMILIES:
        raise ValueError(f"unknown family {fam!r}; known: {', '.join(sorted(FAMILIES))}")
    if fam in _SIZED:
        n = int(a) if a else None
        idx = int(b) if b else 1
        return StateSpec(fam, idx, n)
    if b is not None:
        raise ValueError(f"{fam} takes a single index")
    if a is None:
        return StateSpec(fam, 1)
    if fam == "bell" and a in BELL:
        return StateSpec(fam, BELL_ORDER.index(a) + 1)
    if fam == "bellprimed" and a in BELL_PRIMED:
        return StateSpec(fam, BELL_PRIMED_ORDER.index(a) + 1)
    return StateSpec(fam, int(a))


# --- building blocks -------------------------------------------------------


def place(n: int, parts: list[tuple[tuple[int, ...], StateVector]]) -> StateVector:
    """Tensor factors onto the given 1-based particle positions of an ``n``-particle register."""
    order: list[int] = []
    state = None
    for particles, ket in parts:
        if len(particles) != ket.num_qubits:
            raise ValueError("factor size does not match its particle list")
        state = ket if state is None else tensor_product(state, ket)
        order.extend(particles)
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"factors cover particles {sorted(order)}, expected 1..{n}")
    # particle order[j] currently sits at slot j+1; move it home
    perm = [order.index(k) + 1 for k in range(1, n + 1)]
    return permute_particles(state, perm)


def superpose(a: StateVector, b: StateVector, sign: float) -> StateVector:
    return StateVector(a.amplitudes + sign * b.amplitudes, normalize=True)


def _digits(value: int, radices: list[int]) -> list[int]:
    """Mixed-radix digits, most significant first."""
    out = []
    for r in reversed(radices):
        out.append(value % r)
        value //= r
    return out[::-1]


Column = tuple[tuple[int, ...], list[StateVector], list[StateVector]]


def stacked(n: int, columns: list[Column], index: int) -> StateVector:
    """``(1/sqrt 2)[prod_c upper_c[r_c] +- prod_c lower_c[r_c]]`` for member ``index``."""
    radices = [len(c[1]) for c in columns] + [2]
    digits = _digits(index - 1, radices)
    rows, s = digits[:-1], digits[-1]
    upper = place(n, [(c[0], c[1][r]) for c, r in zip(columns, rows)])
    lower = place(n, [(c[0], c[2][r]) for c, r in zip(columns, rows)])
    return superpose(upper, lower, -1.0 if s else 1.0)


def _bit_col(p: int) -> Column:
    return ((p,), [KET0, KET1], [KET1, KET0])


def ghz(n: int, index: int = 1) -> StateVector:
    """``(|0 m> +- |1 m'>)/sqrt 2``: index enumerates ``m`` in binary, ``+`` before ``-``."""
    if not 1 <= index <= 2**n:
        raise ValueError(f"GHZ_{n} index {index} outside 1..{2**n}")
    k, s = divmod(index - 1, 2)
    tail = format(k, f"0{n - 1}b") if n > 1 else ""
    first = "0" + tail
    second = "".join("1" if c == "0" else "0" for c in first)
    return StateVector.from_terms({first: 1.0, second: -1.0 if s else 1.0})


def w_state(n: int) -> StateVector:
    terms = {"".join("1" if j == k else "0" for j in range(n)): 1.0 for k in range(n)}
    return StateVector.from_terms(terms)


def zeta(index: int) -> StateVector:
    """Three-particle set built from Bell pairs on particles 1, 3 and a bit on particle 2."""
    if not 1 <= index <= 8:
        raise ValueError("zeta index must be 1..8")
    pair, s = divmod(index - 1, 2)
    bell_a, bell_b, bit_a, bit_b = [
        ("phi+", "phi-", KET0, KET1),
        ("phi+", "phi-", KET1, KET0),
        ("psi+", "psi-", KET0, KET1),
        ("psi+", "psi-", KET1, KET0),
    ][pair]
    a = place(3, [((1, 3), BELL[bell_a]), ((2,), bit_a)])
    b = place(3, [((1, 3), BELL[bell_b]), ((2,), bit_b)])
    return superpose(a, b, -1.0 if s else 1.0)


def _four_particle(upper_bell: list[str], lower_bell: list[str], index: int) -> StateVector:
    cols = [
        _bit_col(1),
        ((2, 4), [BELL[b] for b in upper_bell], [BELL[b] for b in lower_bell]),
        _bit_col(3),
    ]
    return stacked(4, cols, index)


def phi4(index: int) -> StateVector:
    return _four_particle(["phi+", "psi+"], ["phi-", "psi-"], index)


def chi4(index: int) -> StateVector:
    return _four_particle(["phi+", "phi-"], ["psi-", "psi+"], index)


def phi4_prime(index: int) -> StateVector:
    return _four_particle(["phi+", "phi-"], ["psi+", "psi-"], index)


@lru_cache(maxsize=None)
def _chi_ordered_cached(n_pairs: int, index: int) -> tuple:
    return tuple(_chi_ordered(n_pairs, index).amplitudes)


def _chi_ordered(n_pairs: int, index: int) -> StateVector:
    if n_pairs == 1:
        return BELL[("phi+", "phi-", "psi-", "psi+")[index - 1]]
    npart = 2 * n_pairs
    inner = 2 ** (2 * n_pairs - 3)  # half of the inner set
    mid = n_pairs + 1  # the particle carrying the separate bit
    # index - 1 = ((r_mid * 2 + r_first) * inner + r_inner) * 2 + s
    r_mid, r_first, r_inner, s = _digits(index - 1, [2, 2, inner, 2])
    sign = -1.0 if s ^ r_mid else 1.0
    rest = tuple(k for k in range(2, npart + 1) if k != mid)
    # the lower inner member complements both bit rows of the upper one; the
    # Bell base (N = 2) keeps its listed pairing
    partner = r_inner ^ (inner // 2) if n_pairs >= 3 else r_inner
    up_inner = chi_ordered(n_pairs - 1, r_inner + 1)
    low_inner = chi_ordered(n_pairs - 1, inner + partner + 1)
    up = place(npart, [((1,), [KET0, KET1][r_first]), (rest, up_inner), ((mid,), [KET0, KET1][r_mid])])
    low = place(npart, [((1,), [KET1, KET0][r_first]), (rest, low_inner), ((mid,), [KET1, KET0][r_mid])])
    return superpose(up, low, sign)


def chi_ordered(n_pairs: int, index: int) -> StateVector:
    """The ``2N``-particle chi set in channel order (``N = n_pairs``).

    For ``N = 2`` members come in pairs ``(|a> phi_24 |c> +- |a'> psi_24 |c'>)/sqrt 2``,
    enumerated with the sign fastest, then the Bell row, then particle 1, then
    particle 3; when particle 3 is in its second row the pair reads ``-+``
    instead of ``+-``.  Larger ``N`` nest the same pattern recursively around
    particle ``N + 1``, with the inner ``(2N - 2)``-particle set on the
    remaining particles ``2..2N``; ``N = 1`` is the Bell list
    ``phi+, phi-, psi-, psi+``.  For ``N >= 3`` the lower inner member is the
    one with both of its bit rows complemented, which keeps teleportation
    through the resulting channel correctable by single-qubit Paulis.
    """
    if not 1 <= index <= 4**n_pairs:
        raise ValueError(f"chi index {index} outside 1..{4**n_pairs}")
    return StateVector(np.array(_chi_ordered_cached(n_pairs, index)))


def generalized_varphi(n_pairs: int, index: int) -> StateVector:
    """``(2N+1)``-particle channel set; ``N = 2`` is the five-particle varphi set."""
    npart = 2 * n_pairs + 1
    if npart > 13:
        raise ValueError(f"{npart} particles exceeds the 13-particle bound")
    if not 1 <= index <= 2**npart:
        raise ValueError(f"index {index} outside 1..{2**npart}")
    half = 2 ** (2 * n_pairs - 1)
    r_chi, r_last, s = _digits(index - 1, [half, 2, 2])
    chi_p = tuple(range(1, npart))
    up = place(npart, [(chi_p, chi_ordered(n_pairs, r_chi + 1)), ((npart,), [KET0, KET1][r_last])])
    low = place(npart, [(chi_p, chi_ordered(n_pairs, half + r_chi + 1)), ((npart,), [KET1, KET0][r_last])])
    return superpose(up, low, -1.0 if s else 1.0)


def varphi5(index: int) -> StateVector:
    return generalized_varphi(2, index)


_GHZ3 = [ghz(3, k) for k in range(1, 9)]


def _five_particle(lower_order: list[int], index: int) -> StateVector:
    cols = [
        _bit_col(1),
        ((2, 3, 4), _GHZ3[0:4], [_GHZ3[k - 1] for k in lower_order]),
        _bit_col(5),
    ]
    return stacked(5, cols, index)


def psi5(index: int) -> StateVector:
    return _five_particle([6, 5, 8, 7], index)


def phi5(index: int) -> StateVector:
    return _five_particle([5, 6, 7, 8], index)


def rigolin4(index: int) -> StateVector:
    """Products of Bell pairs on (1, 2) and (3, 4)."""
    a, b = divmod(index - 1, 4)
    return tensor_product(BELL[BELL_ORDER[a]], BELL[BELL_ORDER[b]])


YEO_CHUA = StateVector.from_terms(
    {"0000": 1, "0011": -1, "0101": -1, "0110": 1, "1001": 1, "1010": 1, "1100": 1, "1111": 1}
)

# Brown et al., J. Phys. A 38, 1119 (2005):
# (|001>|phi->+|010>|psi->+|100>|phi+>+|111>|psi+>)/2
BROWN5 = StateVector.from_terms(
    {
        "00100": 1, "00111": -1,
        "01001": 1, "01010": -1,
        "10000": 1, "10011": 1,
        "11101": 1, "11110": 1,
    }
)

SIGMA5 = StateVector.from_terms({"00000": 1, "01110": 1, "10001": 1, "11111": -1})
SIGMA5_PRIME = StateVector.from_terms(
    {k: 1 for k in ["00000", "00110", "01010", "01100", "10011", "10101", "11001", "11111"]}
)


def make_state(spec: StateSpec | str) -> StateVector:
    """Normalised state for a catalog entry."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    fam, i, n = spec.family, spec.index, spec.num_particles
    if fam == "bell":
        return BELL[BELL_ORDER[i - 1]]
    if fam == "bellprimed":
        return BELL_PRIMED[BELL_PRIMED_ORDER[i - 1]]
    if fam == "ghz":
        return ghz(n, i)
    if fam == "w":
        return w_state(n)
    builders = {
        "zeta": zeta,
        "phi4": phi4,
        "chi4": chi4,
        "chi4ord": lambda k: chi_ordered(2, k),
        "phi4prime": phi4_prime,
        "rigolin4": rigolin4,
        "psi5": psi5,
        "phi5": phi5,
        "varphi5": varphi5,
    }
    if fam in builders:
        return builders[fam](i)
    if fam == "gvarphi":
        return generalized_varphi(n, i)
    if fam == "gchi":
        return chi_ordered(n, i)
    return {"yeochua4": YEO_CHUA, "brown5": BROWN5, "sigma5": SIGMA5, "sigma5prime": SIGMA5_PRIME}[fam]


def family_specs(family: str, num_particles: int | None = None) -> list[StateSpec]:
    probe = StateSpec(family, 1, num_particles)
    lo, hi = index_range(probe)
    return [StateSpec(probe.family, k, probe.num_particles) for k in range(lo, hi + 1)]


def list_family(family: str, num_particles: int | None = None) -> list[StateVector]:
    """Every member of a family, in index order."""
    return [make_state(s) for s in family_specs(family, num_particles)]


def gram(states: list[StateVector]) -> np.ndarray:
    m = np.array([s.amplitudes for s in states])
    return m.conj() @ m.T


def chi_order_permutation() -> list[int]:
    """``p[k-1]`` is the ``chi4`` index of ``chi4ord`` member ``k`` (up to sign)."""
    plain = [chi4(k).amplitudes for k in range(1, 17)]
    out = []
    for k in range(1, 17):
        v = chi_ordered(2, k).amplitudes
        overlaps = [abs(np.vdot(u, v)) for u in plain]
        j = int(np.argmax(overlaps))
        if abs(overlaps[j] - 1) > 1e-12:
            raise AssertionError(f"chi4ord member {k} is not in the chi4 set")
        out.append(j + 1)
    return out
