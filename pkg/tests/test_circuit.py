import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqc1bench.circuit import (
    Circuit,
    Gate,
    build_dqc1_circuit,
    check_payload,
    cnot_count,
    compile_controlled_2x2,
    concat,
    controlled_matrix,
    equal_up_to_phase,
    ry,
    rz,
    unitary_of,
    zyz_angles,
)
from dqc1bench.qstate import CNOT, H, X, PauliAxis, embed


def test_native_gate_conventions():
    np.testing.assert_allclose(ry(0.3), [[math.cos(0.3), math.sin(0.3)], [-math.sin(0.3), math.cos(0.3)]])
    np.testing.assert_allclose(rz(0.3), np.diag([1, np.exp(0.3j)]))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("T", (0,))
    with pytest.raises(ValueError):
        Gate("CNOT", (0,))
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValueError):
        Gate("Rz", (0,))
    with pytest.raises(ValueError):
        Gate("H", (0,), 0.5)
    with pytest.raises(ValueError):
        Circuit(2, (Gate("H", (2,)),))


def test_unitary_of_gate_order():
    # first listed gate acts first: X then H on |0> gives |->
    c = Circuit(1, (Gate("X", (0,)), Gate("H", (0,))))
    np.testing.assert_allclose(unitary_of(c), H @ X)
    bell = Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1))))
    np.testing.assert_allclose(unitary_of(bell), CNOT @ np.kron(H, np.eye(2)))


def test_json_round_trip():
    c = Circuit(3, (Gate("H", (0,)), Gate("Rz", (2,), 0.25), Gate("CNOT", (0, 2))), "demo")
    text = c.to_json()
    assert Circuit.from_json(text) == c
    d = c.to_dict()
    assert d["gates"][1] == {"kind": "Rz", "theta": 0.25, "targets": [2]}
    assert set(d) == {"num_qubits", "label", "gates"}


def test_concat_and_count():
    a = Circuit(2, (Gate("CNOT", (0, 1)),))
    b = Circuit(3, (Gate("CNOT", (0, 2)), Gate("H", (1,))))
    c = concat([a, b])
    assert c.num_qubits == 3 and cnot_count(c) == 2
    assert cnot_count(a + b) == 2


def test_equal_up_to_phase():
    u = H @ rz(0.4)
    assert equal_up_to_phase(np.exp(0.7j) * u, u)
    assert not equal_up_to_phase(2 * u, u)
    assert not equal_up_to_phase(X, H)


def test_zyz_reconstructs(haar):
    def rzh(x):
        return np.diag([np.exp(-0.5j * x), np.exp(0.5j * x)])

    def ryh(x):
        return np.array([[math.cos(x / 2), -math.sin(x / 2)], [math.sin(x / 2), math.cos(x / 2)]])

    for _ in range(50):
        u = haar(2)
        g, a, b, d = zyz_angles(u)
        np.testing.assert_allclose(np.exp(1j * g) * rzh(a) @ ryh(b) @ rzh(d), u, atol=1e-10)


def exact_controlled(u, control, target, n):
    """Reference controlled-u with the phase included."""
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    return embed(p0, (control,), n) + embed(p1, (control,), n) @ embed(u, (target,), n)


@pytest.mark.parametrize("hint,expected", [(None, 5), (5, 5), (2, 2), (3, 2)])
def test_general_block_budgets(haar, hint, expected):
    for _ in range(40):
        u = haar(2)
        c = compile_controlled_2x2(u, hint)
        assert cnot_count(c) == expected
        np.testing.assert_allclose(unitary_of(c), controlled_matrix(u), atol=1e-9)


def test_diagonal_and_scalar_blocks():
    d = np.diag([np.exp(0.3j), np.exp(-1.1j)])
    c = compile_controlled_2x2(d)
    assert cnot_count(c) == 2
    np.testing.assert_allclose(unitary_of(c), controlled_matrix(d), atol=1e-12)
    s = np.exp(0.9j) * np.eye(2)
    c = compile_controlled_2x2(s)
    assert cnot_count(c) == 0  # pure phase kickback on the control
    np.testing.assert_allclose(unitary_of(c), controlled_matrix(s), atol=1e-12)
    c = compile_controlled_2x2(s, simplify=False)
    assert cnot_count(c) == 2
    np.testing.assert_allclose(unitary_of(c), controlled_matrix(s), atol=1e-12)


def test_compile_errors():
    with pytest.raises(ValueError):
        compile_controlled_2x2(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        compile_controlled_2x2(H, budget_hint=1)
    with pytest.raises(ValueError):
        compile_controlled_2x2(np.diag([1, 1j]), budget_hint=1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 4))
def test_compile_on_arbitrary_wires(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    u, _ = np.linalg.qr(a)
    control, target = (int(x) for x in rng.choice(n, size=2, replace=False))
    c = compile_controlled_2x2(u, control=control, target=target, num_qubits=n)
    np.testing.assert_allclose(unitary_of(c), exact_controlled(u, control, target, n), atol=1e-9)


def test_payload_restrictions():
    check_payload(Circuit(2, (Gate("Rz", (0,), 0.1), Gate("CNOT", (0, 1)))))
    with pytest.raises(ValueError):
        check_payload(Circuit(2, (Gate("CNOT", (1, 0)),)))
    with pytest.raises(ValueError):
        check_payload(Circuit(2, (Gate("H", (0,)),)))


def test_dqc1_wrapper_layout():
    payload = compile_controlled_2x2(np.diag([1, 1j]))
    cx = build_dqc1_circuit(payload, 1, PauliAxis.X)
    assert cx.gates[0] == Gate("H", (0,)) and cx.gates[-1] == Gate("H", (0,))
    cy = build_dqc1_circuit(payload, 1, "Y")
    assert cy.gates[-2:] == (Gate("Rz", (0,), -math.pi / 2), Gate("H", (0,)))
    cz = build_dqc1_circuit(payload, 1, "Z")
    assert len(cz) == len(payload) + 1
    with pytest.raises(ValueError):
        build_dqc1_circuit(Circuit(3, ()), 1, "X")
