import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clustercorr import catalog, protocols
from clustercorr.protocols import (
    DENSE_OPERATORS,
    CorrectionOp,
    channel_capacity,
    charlie_basis,
    controlled_dense_run,
    correction_table,
    dense_decode,
    dense_encode,
    dense_gram,
    direct_dense_run,
    filter_unitary,
    info_sweep,
    sweep_csv,
    teleport_controlled,
    teleport_direct,
    teleport_generalized,
    u_first,
    u_second,
)
from clustercorr.qstate import StateVector, random_state

GRID = np.linspace(0, math.pi / 4, 50)


def _full_register_branch(message, channel, bra, alice, charlie_bit=None, charlie=None):
    """Bob's unnormalised state from the explicit joint vector, without the branch-map shortcut."""
    joint = np.kron(message.amplitudes, channel.amplitudes)
    n = message.num_qubits + channel.num_qubits
    t = joint.reshape((2,) * n)
    order = [a - 1 for a in alice]
    if charlie is not None:
        order.append(charlie - 1)
    rest = [k for k in range(n) if k not in order]
    t = np.transpose(t, order + rest)
    if charlie is None:
        t = t.reshape(1 << len(alice), -1)
    else:
        t = t.reshape(1 << len(alice), 2, -1)[:, charlie_bit, :]
    return bra.conj() @ t


def test_correction_op_basics():
    op = CorrectionOp(5, ("X", "Z"))
    assert str(op) == "ZX5"
    z, x = np.diag([1, -1]), np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(op.matrix(), z @ x)
    assert CorrectionOp.parse("ZX5") == op
    assert CorrectionOp.parse("I6") == CorrectionOp(6)
    for bad in ("Q5", "XYZ5", "X"):
        with pytest.raises(ValueError):
            CorrectionOp.parse(bad)


def test_direct_identity_outcomes(rng):
    rep = teleport_direct(random_state(2, rng), 10)
    identity = [o.label for o in rep.outcomes if o.identity]
    assert identity == ["Phi(1)", "Phi(30)"]
    assert rep.outcome("Phi(1)").probability == pytest.approx(1 / 32, abs=1e-12)
    assert sum(rep.outcome(l).probability for l in identity) == pytest.approx(1 / 16, abs=1e-12)


def test_direct_against_full_register(rng):
    channel = catalog.varphi5(10)
    basis = catalog.list_family("phi5")
    table = correction_table(2, 10, False)
    for _ in range(3):
        msg = random_state(2, rng)
        for i, bra in enumerate(basis, 1):
            bob = _full_register_branch(msg, channel, bra.amplitudes, [1, 2, 3, 4, 5])
            p = np.vdot(bob, bob).real
            assert p == pytest.approx(1 / 32, abs=1e-12)
            c = [CorrectionOp.parse(x) for x in table[f"Phi({i})"]]
            fixed = np.kron(c[0].matrix(), c[1].matrix()) @ bob / math.sqrt(p)
            assert abs(np.vdot(msg.amplitudes, fixed)) ** 2 == pytest.approx(1, abs=1e-9)


def test_controlled_against_full_register(rng):
    channel = catalog.varphi5(10)
    basis = catalog.list_family("chi4")
    table = correction_table(2, 10, True)
    msg = random_state(2, rng)
    for i, bra in enumerate(basis, 1):
        for c_bit in (0, 1):
            bob = _full_register_branch(msg, channel, bra.amplitudes, [1, 2, 3, 4], c_bit, 7)
            p = np.vdot(bob, bob).real
            c = [CorrectionOp.parse(x) for x in table[f"chi({i}),{c_bit}"]]
            fixed = np.kron(c[0].matrix(), c[1].matrix()) @ bob / math.sqrt(p)
            assert abs(np.vdot(msg.amplitudes, fixed)) ** 2 == pytest.approx(1, abs=1e-9)


def test_controlled_chi5_examples(rng):
    rep = teleport_controlled(random_state(2, rng), 10)
    assert rep.outcome("chi(5),0").identity
    corr = rep.outcome("chi(5),1").corrections
    assert corr[0] == CorrectionOp(5, ("X", "Z"))
    assert corr[1] == CorrectionOp(6)
    assert len(rep.outcomes) == 32


@pytest.mark.parametrize("controlled", [False, True])
def test_every_channel_teleports(controlled, rng):
    msg = random_state(2, rng)
    for i in range(1, 33):
        rep = teleport_generalized(2, msg, i, controlled)
        assert rep.overall_success
        assert all(len(c.ops) <= 2 for o in rep.outcomes for c in o.corrections)


def test_generalized_reduces_to_n2(rng):
    for _ in range(10):
        msg = random_state(2, rng)
        a, b = teleport_direct(msg, 10), teleport_generalized(2, msg, 10, False)
        assert [(o.label, o.corrections) for o in a.outcomes] == [(o.label, o.corrections) for o in b.outcomes]
        np.testing.assert_allclose([o.probability for o in a.outcomes], [o.probability for o in b.outcomes])


def test_generalized_n3(rng):
    rep = teleport_generalized(3, random_state(3, rng), 10, controlled=False)
    assert rep.overall_success and len(rep.outcomes) == 128
    rep = teleport_generalized(3, random_state(3, rng), 10, controlled=True)
    assert rep.overall_success and len(rep.outcomes) == 128
    assert sum(o.probability for o in rep.outcomes) == pytest.approx(1, abs=1e-10)


def test_teleport_errors(rng):
    with pytest.raises(ValueError):
        teleport_direct(random_state(2, rng), 33)
    with pytest.raises(ValueError):
        teleport_direct(random_state(3, rng), 1)
    with pytest.raises(ValueError):
        teleport_generalized(6, random_state(6, rng), 1)


def test_shipped_correction_data_regenerates():
    assert protocols.generate_correction_data() == protocols.shipped_corrections()


def test_report_json(rng):
    d = teleport_direct(random_state(2, rng)).to_json()
    assert d["total_probability"] == pytest.approx(1, abs=1e-10)
    assert d["outcomes"][0]["corrections"] == ["I6", "I7"]


def test_dense_encode_identity_is_channel():
    np.testing.assert_allclose(dense_encode(1, "III").amplitudes, catalog.varphi5(1).amplitudes)
    with pytest.raises(ValueError):
        dense_encode(1, "yyy")


def test_dense_gram_and_round_trip():
    assert len(set(DENSE_OPERATORS)) == 32
    np.testing.assert_allclose(dense_gram(1), np.eye(32), atol=1e-10)
    for label in DENSE_OPERATORS:
        assert dense_decode(dense_encode(1, label), 1) == label
    rep = direct_dense_run(1)
    assert rep.average_bits == 5 and rep.interface == "direct"


def test_capacity_examples():
    assert channel_capacity(catalog.varphi5(1), {1, 2, 3}) == pytest.approx(5, abs=1e-9)
    assert channel_capacity(catalog.BELL["phi+"], {1}) == pytest.approx(2, abs=1e-12)
    assert channel_capacity(StateVector.basis("00"), {1}) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        channel_capacity(catalog.BELL["phi+"], set())


def test_charlie_basis_examples():
    x1, x2 = charlie_basis(0)
    np.testing.assert_allclose(x1.amplitudes, [1, 0])
    np.testing.assert_allclose(x2.amplitudes, [0, -1])
    x1, x2 = charlie_basis(math.pi / 4)
    np.testing.assert_allclose(x1.amplitudes, np.array([1, 1]) / math.sqrt(2))
    np.testing.assert_allclose(x2.amplitudes, np.array([1, -1]) / math.sqrt(2))
    x1, _ = charlie_basis(math.pi / 6)
    assert x1.amplitudes[0].real == pytest.approx(math.cos(math.pi / 6))
    # above pi/4 the angle is folded
    np.testing.assert_allclose(charlie_basis(math.pi / 3)[0].amplitudes, charlie_basis(math.pi / 6)[0].amplitudes)
    for bad in (-0.1, 2.0):
        with pytest.raises(ValueError):
            charlie_basis(bad)


@given(st.floats(0, math.pi / 2))
def test_charlie_basis_orthonormal(theta):
    x1, x2 = charlie_basis(theta)
    assert abs(np.vdot(x1.amplitudes, x2.amplitudes)) < 1e-12


@pytest.mark.parametrize("theta", GRID)
def test_filter_unitaries(theta):
    for u in (u_first(theta), u_second(theta)):
        np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-10)
    t = math.tan(theta)
    assert u_first(theta)[0, 0] == pytest.approx(t)
    assert u_first(theta)[0, 1] == pytest.approx(math.sqrt(1 - t * t))
    assert u_second(theta)[2, 3] == pytest.approx(math.sqrt(1 - t * t))
    assert u_second(theta)[0, 0] == 1


def test_filter_blocks_follow_branch():
    for kind in ("psi5", "phi5"):
        rep = controlled_dense_run(kind, 0.3, "C-A")
        assert [b.blocks for b in rep.branches] == [(0b00, 0b11), (0b01, 0b10)]
    rep = controlled_dense_run("ghz5", 0.3, "C-A")
    assert [b.blocks for b in rep.branches] == [(0b00,), (0b11,)]
    assert all(b.blocks == () for b in controlled_dense_run("varphi5", 0.3, "C-A").branches)


def test_dense_examples():
    rep = controlled_dense_run("Psi5_1", math.pi / 4, "C-A")
    assert rep.average_bits == pytest.approx(4, abs=1e-9)
    assert rep.aux_outcome_probs["0"] == pytest.approx(1, abs=1e-10)
    assert controlled_dense_run("psi5", 0, "C-A").average_bits == pytest.approx(3, abs=1e-9)
    for th in GRID[::7]:
        assert controlled_dense_run("ghz5", th).average_bits == pytest.approx(2 * math.sin(th) ** 2 + 2, abs=1e-9)
        assert controlled_dense_run("varphi5", th, "C-B").average_bits == pytest.approx(4, abs=1e-9)


@given(st.sampled_from(["psi5", "phi5", "ghz5", "varphi5"]), st.floats(0, math.pi / 2))
def test_dense_invariants(kind, theta):
    a = controlled_dense_run(kind, theta, "C-A")
    b = controlled_dense_run(kind, theta, "C-B")
    assert a.average_bits == pytest.approx(b.average_bits, abs=1e-9)
    for rep in (a, b):
        assert sum(rep.aux_outcome_probs.values()) == pytest.approx(1, abs=1e-12)
        total = sum(br.probability * (br.aux_probs[0] * br.bits[0] + br.aux_probs[1] * br.bits[1]) for br in rep.branches)
        assert rep.average_bits == pytest.approx(total, abs=1e-10)
        assert all(br.decoded for br in rep.branches)


def test_dense_mirror_rule():
    a = controlled_dense_run("psi5", math.pi / 3, "C-A")
    b = controlled_dense_run("psi5", math.pi / 6, "C-A")
    assert a.average_bits == pytest.approx(b.average_bits, abs=1e-12)


def test_dense_errors():
    with pytest.raises(ValueError):
        controlled_dense_run("psi5", 2.0)
    with pytest.raises(ValueError):
        controlled_dense_run("nosuch", 0.1)
    with pytest.raises(ValueError):
        controlled_dense_run("psi5", 0.1, "C-D")


def test_u_a1b5_decode_for_psi_branches():
    key, ch = protocols._channel("psi5")
    for name, p, v in protocols._charlie_branches(ch, 0.4):
        ref = {n: vv for n, _, vv in protocols._charlie_branches(ch, protocols.THETA_REF)}[name]
        blocks = protocols._filter_blocks(protocols._alice_weights(ref))
        _, states = protocols._apply_filter(v, 0.4, blocks)
        assert protocols._decode_ghz(states[0], protocols.TWO_QUBIT_PAULIS)


def test_cb_readout_subsets_for_psi5():
    _, ch = protocols._channel("psi5")
    _, _, v = protocols._charlie_branches(ch, 0.3)[0]
    subsets = {}
    for p in protocols.TWO_QUBIT_PAULIS:
        r, _ = protocols._bob_readout(protocols._encode2(v, p))
        subsets.setdefault(r, set()).add(p)
    assert subsets[0] == {"II", "zI", "Iz", "zz"}
    assert len(subsets) == 4 and all(len(s) == 4 for s in subsets.values())


def test_info_sweep_examples():
    rows = info_sweep(["psi5"], [0, math.pi / 8, math.pi / 4])
    np.testing.assert_allclose([r[2] for r in rows], [3, 3 + 2 * math.sin(math.pi / 8) ** 2, 4], atol=1e-9)
    assert info_sweep(["ghz5"], [math.pi / 4])[0][2] == pytest.approx(3, abs=1e-9)
    assert all(r[2] == pytest.approx(4) for r in info_sweep(["varphi5"], GRID[::10]))


def test_info_sweep_monotone_and_csv():
    rows = info_sweep(["psi5", "phi5", "ghz5"], GRID)
    for kind in ("psi5", "phi5", "ghz5"):
        bits = [r[2] for r in rows if r[0] == kind]
        assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(bits, bits[1:]))
    text = sweep_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == ["channel", "theta", "avg_bits", "p_aux0", "p_aux1"]
    assert parsed[2][1] == f"{GRID[1]:.12g}"
