import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clustercorr import catalog
from clustercorr.errors import NumericalError
from clustercorr.linalg import hermitian_eigenvalues, hermitian_sqrt, jacobi_eigh
from clustercorr.qstate import partial_trace


def _random_hermitian(r, d):
    a = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    return a + a.conj().T


def test_examples():
    np.testing.assert_allclose(hermitian_eigenvalues(np.eye(2)), [1, 1])
    np.testing.assert_allclose(hermitian_eigenvalues(np.eye(4) / 2), [0.5] * 4)
    rho_a = partial_trace(catalog.ghz(3), [1]).entries
    np.testing.assert_allclose(hermitian_eigenvalues(rho_a), [0.5, 0.5], atol=1e-15)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_matches_lapack_and_reconstructs(d, seed):
    m = _random_hermitian(np.random.default_rng(seed), d)
    w, v = jacobi_eigh(m)
    np.testing.assert_allclose(w, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-9)
    np.testing.assert_allclose((v * w) @ v.conj().T, m, atol=1e-9)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-10)
    assert w.sum() == pytest.approx(np.trace(m).real, abs=1e-9)
    assert (w**2).sum() == pytest.approx(np.trace(m @ m).real, abs=1e-9 * max(1, np.trace(m @ m).real))


def test_degenerate_and_diagonal():
    w, v = jacobi_eigh(np.diag([3.0, 1.0, 3.0]))
    np.testing.assert_allclose(w, [3, 3, 1])


def test_sqrt(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    p = a @ a.conj().T
    r = hermitian_sqrt(p)
    np.testing.assert_allclose(r @ r, p, atol=1e-9)
    with pytest.raises(NumericalError):
        hermitian_sqrt(-np.eye(2))
