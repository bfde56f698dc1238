from math import comb

import numpy as np
import pytest

from oracles import compound_brute, givens_ref, random_orthogonal
from subspace_states import InvalidOperation, ResourceLimit
from subspace_states.circuit import Circuit, Gate, fbs, rbs
from subspace_states.compound_sve import (block_embedding, block_encoding_check,
                                          compound_spectrum_check, givens_sector_unitary,
                                          pe_kernel, phase_distribution, principal_angles_oracle,
                                          sector_unitary_from_circuit, subspace_sve, success_rate,
                                          sve_summary)
from subspace_states.givens import decompose, pad_orthogonal


def test_identity_circuit():
    np.testing.assert_array_equal(sector_unitary_from_circuit(Circuit(5), 2), np.eye(10))


def test_weight_changing_circuit_rejected():
    with pytest.raises(InvalidOperation):
        sector_unitary_from_circuit(Circuit(3, (Gate("X", (1,)),)), 1)


def test_sector_unitary_is_orthogonal():
    c = Circuit(5, (fbs(1, 4, 0.3), rbs(2, 3, 1.2), Gate("CZ", (1, 5))))
    M = sector_unitary_from_circuit(c, 2)
    np.testing.assert_allclose(M.T @ M, np.eye(10), atol=1e-12)


@pytest.mark.parametrize("method", ["pyramid", "csd"])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_givens_circuit_acts_as_compound(g, method, n):
    U = random_orthogonal(g, n)
    if method == "csd":
        U = pad_orthogonal(U)
    dec = decompose(U, method)
    for k in range(1, U.shape[0] + 1):
        np.testing.assert_allclose(givens_sector_unitary(dec, k), compound_brute(U, k), atol=1e-9)
    top = givens_sector_unitary(dec, U.shape[0])
    assert top.shape == (1, 1) and top[0, 0] == pytest.approx(np.linalg.det(U))


def test_spectrum_examples(g):
    U = np.eye(3)
    U[:2, :2] = givens_ref(2, 1, 2, np.pi / 4)
    rep = compound_spectrum_check(U, 1)
    assert sorted(rep["phases"]) == pytest.approx([-np.pi / 4, 0, np.pi / 4])
    assert compound_spectrum_check(np.eye(4), 2)["phases"] == pytest.approx([0] * 6)
    for k in range(1, 6):
        assert compound_spectrum_check(random_orthogonal(g, 5), k)["residual"] < 1e-8


def test_principal_angles_examples(g):
    U = block_embedding(np.diag([0.9, 0.5]))
    rep = principal_angles_oracle(np.eye(4), U, [1, 2], [1, 2], 2)
    assert rep["cosines"] == [(0b11, pytest.approx(0.45))]
    assert rep["residual"] < 1e-8
    Q = random_orthogonal(g, 5)
    assert all(c == pytest.approx(1) for _, c in
               principal_angles_oracle(Q, Q, [1, 2, 3], [1, 2, 3], 2)["cosines"])
    P, Q = random_orthogonal(g, 5), random_orthogonal(g, 5)
    rep = principal_angles_oracle(P, Q, [1, 3, 4], [2, 4, 5], 1)
    sv = np.linalg.svd((P.T @ Q)[np.ix_([0, 2, 3], [1, 3, 4])], compute_uv=False)
    assert sorted(c for _, c in rep["cosines"]) == pytest.approx(sorted(sv))


def test_block_encoding_of_compounds(g):
    for n in range(3, 7):
        P, Q = random_orthogonal(g, n), random_orthogonal(g, n)
        I = sorted((g.choice(n, n - 1, replace=False) + 1).tolist())
        J = sorted((g.choice(n, n - 2, replace=False) + 1).tolist())
        for k in range(1, n - 1):
            assert block_encoding_check(P, Q, I, J, k) < 1e-9


def test_block_embedding(g):
    A = g.normal(size=(3, 2))
    A /= 1.2 * np.linalg.norm(A, 2)
    U = block_embedding(A)
    np.testing.assert_allclose(U.T @ U, np.eye(5), atol=1e-12)
    np.testing.assert_allclose(U[:3, :2], A)


def test_pe_kernel_matches_textbook_sum():
    bits, M = 5, 32
    lam = np.exp(1j * np.array([0.0, 0.3, 2 * np.pi * 7 / M, 5.9]))
    tau = np.arange(M)
    ref = np.array([[np.sum((l * np.exp(-2j * np.pi * m / M)) ** tau) / M for m in range(M)]
                    for l in lam])
    np.testing.assert_allclose(pe_kernel(lam, bits), ref, atol=1e-12)


def test_phase_distribution_on_eigenvector():
    phi = 1.234
    W = np.diag(np.exp(1j * np.array([phi, -0.4])))
    psi = np.array([1.0, 0.0])
    joint = phase_distribution(W, psi, [np.eye(2)[:, [0]]], 6)
    m = np.arange(64)
    ref = np.abs(np.array([np.mean(np.exp(1j * np.arange(64) * (phi - 2 * np.pi * k / 64)))
                           for k in m])) ** 2
    np.testing.assert_allclose(joint[0], ref, atol=1e-12)
    assert joint[1].sum() < 1e-12


def test_sve_trivial_block():
    r = subspace_sve(np.eye(2), 2, 6, 50, seed=1)
    assert all(abs(e.cos - 1) <= 0.1 for e in r["estimates"])


def test_sve_eigenphases_add():
    a, b = 0.7, 0.3
    U = givens_ref(4, 1, 3, a) @ givens_ref(4, 2, 4, b)
    r = subspace_sve(U[:2, :2], 2, 8, 200, seed=5, mode="eigen", U=U)
    pair = [S for S, th in r["truth"].items() if th == pytest.approx(a + b)]
    assert pair
    r = subspace_sve(U[:2, :2], 2, 8, 200, seed=5, mode="eigen", U=U, weights={pair[0]: 1.0})
    close = [abs(e.theta - (a + b)) <= 2 * 2 * np.pi / 256 for e in r["estimates"]]
    assert np.mean(close) >= 0.8


def test_sve_singular_values(g):
    sig = np.array([0.9, 0.7, 0.4, 0.2])
    A = random_orthogonal(g, 4) @ np.diag(sig) @ random_orthogonal(g, 4).T
    tol = 2 * 2 * np.pi / 2 ** 8
    for k in (1, 2, 3):
        for S, theta in subspace_sve(A, k, 8, 1, 0)["truth"].items():
            idx = [i for i in range(4) if S >> i & 1]
            assert np.cos(theta) == pytest.approx(np.prod(sig[idx]))
            r = subspace_sve(A, k, 8, 100, seed=S, weights={S: 1.0})
            assert success_rate(r, tol) >= 0.8


def test_sve_superposition_splits(g):
    A = np.diag([0.9, 0.6, 0.3])
    r = subspace_sve(A, 2, 7, 10000, seed=8, weights={0b011: 1.0, 0b110: 1.0})
    summary = sve_summary(r)
    assert set(summary) == {"1,2", "2,3"}
    for key, cos in (("1,2", 0.54), ("2,3", 0.18)):
        assert summary[key]["shots"] / 10000 == pytest.approx(0.5, abs=0.02)
        assert summary[key]["true_cos"] == pytest.approx(cos)


def test_sve_caps():
    with pytest.raises(ResourceLimit):
        subspace_sve(np.eye(2), 1, 13, 1, 0)
    with pytest.raises(ResourceLimit):
        subspace_sve(np.eye(8) * 0.5, 5, 4, 1, 0)    # C(16, 5) > 2000
    assert comb(16, 5) > 2000
