import itertools
from functools import reduce
from math import factorial

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PAULI = {
    "I": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1.0, -1.0]).astype(complex),
}


def dense_pauli(label: str) -> np.ndarray:
    """Explicit 2**n x 2**n matrix, particle 1 leftmost in the Kronecker product."""
    return reduce(np.kron, [PAULI[a] for a in label])


def dense_expectation(vec_or_rho: np.ndarray, label: str) -> float:
    m = dense_pauli(label)
    if vec_or_rho.ndim == 1:
        return float(np.vdot(vec_or_rho, m @ vec_or_rho).real)
    return float(np.trace(vec_or_rho @ m).real)


def restricted_growth(n: int):
    """Set partitions of range(n) enumerated as restricted growth strings."""
    for code in itertools.product(range(n), repeat=n):
        if code[0] != 0:
            continue
        if all(code[i] <= max(code[:i]) + 1 for i in range(1, n)):
            blocks = {}
            for i, b in enumerate(code):
                blocks.setdefault(b, []).append(i)
            yield list(blocks.values())


def dense_cumulant(vec_or_rho: np.ndarray, label: str) -> float:
    """Joint cumulant built from explicit matrices; independent of the package engine."""
    n = len(label)
    total = 0.0
    for part in restricted_growth(n):
        k = len(part)
        term = (-1) ** (k - 1) * factorial(k - 1)
        for block in part:
            sub = "".join(a if i in block else "I" for i, a in enumerate(label))
            term *= dense_expectation(vec_or_rho, sub)
        total += term
    return total


def haar_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, d: int = 2) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
