from math import ceil, log2

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import fbs_expm, rbs_expm
from subspace_states import InvalidArgument
from subspace_states.circuit import (Circuit, Gate, circuit_unitary, depth, fbs, gate_count,
                                     gate_counts, lower_fbs, parity_tree, rbs)


def test_gate_normalizes_reversed_pair():
    g = Gate("RBS", (3, 1), 0.4)
    assert g.qubits == (1, 3) and g.theta == -0.4
    np.testing.assert_allclose(circuit_unitary(Circuit(3, (g,))),
                               circuit_unitary(Circuit(3, (rbs(1, 3, -0.4),))))


@pytest.mark.parametrize("args", [("RBS", (1, 2), None), ("X", (1,), 0.3), ("CZ", (1,), None),
                                  ("RBS", (2, 2), 0.1), ("H", (1,), None), ("X", (0,), None)])
def test_gate_validation(args):
    with pytest.raises(InvalidArgument):
        Gate(*args)


def test_circuit_rejects_out_of_range_qubit():
    with pytest.raises(InvalidArgument):
        Circuit(2, (rbs(1, 3, 0.1),))


def test_rbs_matches_exponential():
    for n, i, j in [(2, 1, 2), (4, 1, 3), (4, 2, 4)]:
        np.testing.assert_allclose(circuit_unitary(Circuit(n, (rbs(i, j, 0.7),))),
                                   rbs_expm(n, i, j, 0.7), atol=1e-14)


def test_rbs_on_basis_states():
    c, s = np.cos(0.3), np.sin(0.3)
    U = circuit_unitary(Circuit(2, (rbs(1, 2, 0.3),)))
    # |{1}> -> cos|{1}> + sin|{2}>, |00> and |11> fixed
    np.testing.assert_allclose(U[:, 0b01], [0, c, s, 0], atol=1e-15)
    np.testing.assert_allclose(U[:, 0b10], [0, -s, c, 0], atol=1e-15)
    assert U[0, 0] == 1 and U[3, 3] == 1


def test_fbs_sign_depends_on_parity_between():
    c, s = np.cos(0.5), np.sin(0.5)
    U = circuit_unitary(Circuit(3, (fbs(1, 3, 0.5),)))
    assert U[0b100, 0b001] == pytest.approx(s)      # nothing between
    assert U[0b110, 0b011] == pytest.approx(-s)     # qubit 2 set
    assert U[0b011, 0b011] == pytest.approx(c)


@given(st.integers(2, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(1, n - 1), st.integers(1, n - 1))),
    st.floats(-np.pi, np.pi))
def test_lowered_fbs_equals_exponential(nij, theta):
    n, i, off = nij
    j = min(n, i + off)
    ref = fbs_expm(n, i, j, theta)
    lowered = Circuit(n, lower_fbs(fbs(i, j, theta)))
    np.testing.assert_allclose(circuit_unitary(lowered), ref, atol=1e-12)
    np.testing.assert_allclose(circuit_unitary(Circuit(n, (fbs(i, j, theta),))), ref, atol=1e-12)
    assert all(g.kind in ("RBS", "CZ", "CX") for g in lowered.gates)


def test_lowered_fbs_depth_bound():
    for n in range(2, 12):
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                c = Circuit(n, (fbs(i, j, 0.1),))
                bound = 2 * ceil(log2(j - i)) + 3 if j - i > 1 else 1
                assert depth(c) <= bound


def test_parity_tree_layers():
    gates = parity_tree(range(1, 9))
    assert len(gates) == 7
    assert depth(Circuit(8, tuple(gates))) == 3
    assert parity_tree([4]) == []


def test_depth_packs_disjoint_gates():
    c = Circuit(4, (rbs(1, 2, 0.1), rbs(3, 4, 0.1), rbs(2, 3, 0.1)))
    assert depth(c) == 2
    assert depth(Circuit(4)) == 0


def test_inverse_and_counts():
    c = Circuit(4, (rbs(1, 2, 0.3), Gate("X", (1,)), fbs(1, 4, 0.2), Gate("CX", (1, 2))))
    U = circuit_unitary(c)
    np.testing.assert_allclose(circuit_unitary(c.inverse()) @ U, np.eye(16), atol=1e-14)
    assert gate_count(c) == 4 and gate_count(c, "RBS") == 1
    assert gate_counts(c) == {"RBS": 1, "FBS": 1, "X": 1, "CX": 1}
    assert not c.weight_preserving


def test_json_roundtrip():
    c = Circuit(3, (rbs(1, 2, 0.25), Gate("CZ", (2, 1)), Gate("X", (3,))), "demo")
    back = Circuit.from_json(c.to_json())
    assert back == c and back.label == "demo"
    assert "label" not in Circuit(2).to_dict()
    with pytest.raises(InvalidArgument):
        Circuit.from_dict({"n": 2, "gates": [{"q": [1]}]})
