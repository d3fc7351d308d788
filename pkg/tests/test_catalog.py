import numpy as np
import pytest

from clustercorr import catalog
from clustercorr.circuits import Gate, apply_gate, equal_up_to_global_phase
from clustercorr.cluster import correlation_tensor
from clustercorr.qstate import StateVector, tensor_product

FAMILY_KEYS = {
    "phi4": {"xxyy", "xyyx", "yxxy", "yyxx"},
    "chi4": {"xxxz", "xzxx", "yxyz", "yzyx"},
    "phi4prime": {"xzyy", "xyyz", "yzxy", "yyxz"},
    "psi5": {"xxzxx", "xyzyx", "yxzxy", "yyzyy"},
    "phi5": {"xxzyy", "xyzxy", "yxzyx", "yyzxx"},
    "varphi5": {"xxxzz", "xxzzx", "xzxxz", "xzzxx"},
}
FAMILY_SIZES = {
    "bell": 4, "bellprimed": 4, "zeta": 8, "phi4": 16, "chi4": 16, "chi4ord": 16, "phi4prime": 16,
    "rigolin4": 16, "psi5": 32, "phi5": 32, "varphi5": 32,
}


def test_varphi5_10_expansion():
    expected = StateVector.from_terms(
        {"00000": 1, "00101": -1, "11100": 1, "11001": 1, "01111": 1, "01010": -1, "10011": 1, "10110": 1}
    )
    np.testing.assert_allclose(catalog.varphi5(10).amplitudes, expected.amplitudes, atol=1e-15)


def test_named_expansions():
    cases = {
        "ghz:3:1": {"000": 1, "111": 1},
        "w:5": {"00001": 1, "00010": 1, "00100": 1, "01000": 1, "10000": 1},
        "phi4:1": {"0000": 1, "0101": 1, "1010": 1, "1111": -1},
        "chi4:1": {"0000": 1, "0101": 1, "1011": 1, "1110": -1},
        "phi4prime:1": {"0000": 1, "0101": 1, "1011": 1, "1110": 1},
        "sigma5": {"00000": 1, "01110": 1, "10001": 1, "11111": -1},
    }
    for spec, terms in cases.items():
        np.testing.assert_allclose(
            catalog.make_state(spec).amplitudes, StateVector.from_terms(terms).amplitudes, atol=1e-15
        )


def test_rigolin_is_bell_product():
    s = catalog.rigolin4(1)
    np.testing.assert_allclose(
        s.amplitudes, tensor_product(catalog.BELL["phi+"], catalog.BELL["phi+"]).amplitudes, atol=1e-15
    )


@pytest.mark.parametrize("family,size", sorted(FAMILY_SIZES.items()))
def test_families_are_orthonormal(family, size):
    states = catalog.list_family(family)
    assert len(states) == size
    np.testing.assert_allclose(catalog.gram(states), np.eye(size), atol=1e-12)


@pytest.mark.parametrize("family,n", [("ghz", 3), ("ghz", 5), ("gvarphi", 2), ("gvarphi", 3), ("gchi", 3)])
def test_sized_families_are_orthonormal(family, n):
    states = catalog.list_family(family, n)
    np.testing.assert_allclose(catalog.gram(states), np.eye(len(states)), atol=1e-12)


def test_all_states_normalized():
    for fam in catalog.FAMILIES:
        size = {"ghz": 3, "w": 4, "gvarphi": 2, "gchi": 2}.get(fam)
        for s in catalog.list_family(fam, size):
            assert np.linalg.norm(s.amplitudes) == pytest.approx(1, abs=1e-12)


def test_generalized_varphi_reduces_to_varphi5():
    for i in range(1, 33):
        np.testing.assert_allclose(catalog.generalized_varphi(2, i).amplitudes, catalog.varphi5(i).amplitudes)


def test_generalized_varphi_seven_particles():
    a, b = catalog.generalized_varphi(3, 1), catalog.generalized_varphi(3, 2)
    assert a.num_qubits == 7
    assert np.linalg.norm(a.amplitudes) == pytest.approx(1, abs=1e-12)
    assert abs(np.vdot(a.amplitudes, b.amplitudes)) < 1e-12


def test_generalized_chi_base_is_ordered_chi4():
    for i in range(1, 17):
        np.testing.assert_allclose(catalog.chi_ordered(2, i).amplitudes, catalog.make_state(f"chi4ord:{i}").amplitudes)


def test_chi_orders_cross_reference():
    perm = catalog.chi_order_permutation()
    assert sorted(perm) == list(range(1, 17))
    for k, j in enumerate(perm, 1):
        assert equal_up_to_global_phase(catalog.chi_ordered(2, k), catalog.chi4(j))


@pytest.mark.parametrize("family,keys", sorted(FAMILY_KEYS.items()))
def test_family_signatures(family, keys):
    for s in catalog.list_family(family):
        sig = correlation_tensor(s)
        assert sig.keys == keys
        assert all(abs(abs(v) - 1) < 1e-9 for v in sig.entries.values())


def test_rigolin_family_signature_empty():
    assert all(len(correlation_tensor(s)) == 0 for s in catalog.list_family("rigolin4"))


def test_yeo_chua_signature():
    assert correlation_tensor(catalog.YEO_CHUA).keys == {"xyyx", "xzzx", "zyyz", "zzzz"}


def test_brown_signature_has_six_unit_keys():
    sig = correlation_tensor(catalog.BROWN5)
    assert len(sig) == 6
    assert sig.keys == {"xxzxz", "xzyyx", "yyzzx", "yzxxy", "zxyzy", "zyxyz"}
    assert all(abs(abs(v) - 1) < 1e-9 for v in sig.entries.values())


def test_sigma_states_related_by_three_hadamards():
    s = catalog.SIGMA5
    for k in (2, 3, 4):
        s = apply_gate(s, Gate("H", (k,)))
    assert equal_up_to_global_phase(s, catalog.SIGMA5_PRIME)
    printed = {"xxxyy", "xxyxy", "xyxxy", "xyyyy", "xzzzx", "yxxyx", "yxyxx", "yyxxx", "yyyyx", "yzzzy"}
    assert correlation_tensor(catalog.SIGMA5).keys == printed


def test_spec_parsing_and_ranges():
    assert catalog.parse_spec("varphi5:10") == catalog.StateSpec("varphi5", 10)
    assert catalog.parse_spec("ghz:3:1") == catalog.StateSpec("ghz", 1, 3)
    assert catalog.parse_spec("bell:psi-").index == 4
    for bad in ("varphi5:33", "chi4:0", "ghz:3:9", "nosuch:1", "zeta:1:2"):
        with pytest.raises(ValueError):
            catalog.make_state(bad)
