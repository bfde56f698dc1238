from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import (colex_subsets, compound_brute, det_leibniz, mask_of, minors_brute,
                     random_frame, random_orthogonal)
from subspace_states import DegenerateInput, InvalidArgument, ResourceLimit
from subspace_states.linalg import (angles_to_vector, cauchy_binet_check, check_frame, compound,
                                    format_subset, givens_matrix, orthogonalize, rank_subset,
                                    read_matrix, sector_masks, spherical_angles, subset_determinant,
                                    subset_determinants, subset_indices, subset_mask, unrank_subset,
                                    write_matrix)


def test_subset_mask_roundtrip():
    assert subset_mask([1, 3], 4) == 0b101
    assert subset_indices(0b101) == (1, 3)
    assert format_subset(0b1011) == "1,2,4"
    with pytest.raises(InvalidArgument):
        subset_mask([5], 4)
    with pytest.raises(InvalidArgument):
        subset_mask([1, 1], 4)


def test_sector_order_is_colex():
    for n in range(1, 8):
        for d in range(n + 1):
            want = [mask_of(s) for s in colex_subsets(n, d)]
            assert list(sector_masks(n, d)) == want


@given(st.integers(1, 14).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))),
       st.data())
def test_rank_unrank_bijection(nd, data):
    n, d = nd
    r = data.draw(st.integers(0, comb(n, d) - 1))
    m = unrank_subset(r, n, d)
    assert bin(m).count("1") == d and m >> n == 0
    assert rank_subset(m, n, d) == r


def test_sector_masks_read_only():
    m = sector_masks(5, 2)
    with pytest.raises(ValueError):
        m[0] = 7


def test_sector_cap(monkeypatch):
    monkeypatch.setenv("SUBSPACE_STATES_MAX_SECTOR_DIM", "10")
    with pytest.raises(ResourceLimit):
        sector_masks(9, 4)


def test_subset_determinants_match_leibniz(g):
    for n, d in [(4, 1), (5, 2), (6, 3), (6, 4), (7, 5)]:
        X = g.normal(size=(n, d))
        np.testing.assert_allclose(subset_determinants(X), minors_brute(X), atol=1e-12)
    X = g.normal(size=(5, 3))
    assert subset_determinant(X, 0b10110) == pytest.approx(det_leibniz(X[[1, 2, 4]]))


def test_orthogonalize_keeps_column_space(g):
    A = g.normal(size=(7, 3))
    X = orthogonalize(A)
    np.testing.assert_allclose(X.T @ X, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(X @ X.T @ A, A, atol=1e-12)
    # minors of A and of the frame differ by one positive factor
    ratio = subset_determinants(A) / subset_determinants(X)
    assert np.allclose(ratio, ratio[0]) and ratio[0] > 0


def test_orthogonalize_rank_deficient():
    A = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    with pytest.raises(DegenerateInput, match="rank 1 < 2"):
        orthogonalize(A)


def test_check_frame_rejects():
    with pytest.raises(InvalidArgument):
        check_frame(np.ones((3, 2)))
    with pytest.raises(InvalidArgument):
        check_frame(np.eye(3)[:2])      # more columns than rows


def test_cauchy_binet(g):
    for n, d in [(3, 1), (5, 2), (6, 3)]:
        X, Y = random_frame(g, n, d), random_frame(g, n, d)
        assert cauchy_binet_check(X, Y) == pytest.approx(np.linalg.det(X.T @ Y), abs=1e-12)


def test_givens_matrix():
    G = givens_matrix(4, 2, 4, 0.3)
    np.testing.assert_allclose(G @ np.eye(4)[:, 1], [0, np.cos(0.3), 0, np.sin(0.3)])
    np.testing.assert_allclose(givens_matrix(4, 4, 2, -0.3), G)
    with pytest.raises(InvalidArgument):
        givens_matrix(3, 2, 2, 0.1)


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=9))
def test_spherical_angles_roundtrip(v):
    x = np.array(v)
    if np.linalg.norm(x) < 1e-3:
        return
    x = x / np.linalg.norm(x)
    th = spherical_angles(x)
    assert len(th) == len(x) - 1
    np.testing.assert_allclose(angles_to_vector(th), x, atol=1e-12)


def test_compound_against_enumeration(g):
    A = g.normal(size=(5, 5))
    for k in range(1, 6):
        np.testing.assert_allclose(compound(A, k), compound_brute(A, k), atol=1e-12)
    B = g.normal(size=(3, 5))
    np.testing.assert_allclose(compound(B, 2), compound_brute(B, 2), atol=1e-12)
    assert compound(A, 5)[0, 0] == pytest.approx(np.linalg.det(A))


def test_compound_multiplicative_and_orthogonal(g):
    for n in range(2, 7):
        A, B = g.normal(size=(n, n)), g.normal(size=(n, n))
        U = random_orthogonal(g, n)
        for k in range(1, n + 1):
            np.testing.assert_allclose(compound(A @ B, k), compound(A, k) @ compound(B, k),
                                       atol=1e-10)
            Uk = compound(U, k)
            np.testing.assert_allclose(Uk.T @ Uk, np.eye(comb(n, k)), atol=1e-12)


def test_matrix_io(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("# 3 2\n1 0\n0 1\n0 0\n")
    np.testing.assert_array_equal(read_matrix(p), np.eye(3)[:, :2])
    p.write_text("# 3 3\n1 0\n0 1\n0 0\n")
    with pytest.raises(InvalidArgument):
        read_matrix(p)
    p.write_text("1 2\n3\n")
    with pytest.raises(InvalidArgument, match="ragged"):
        read_matrix(p)
    M = np.arange(6.0).reshape(3, 2) / 7
    write_matrix(tmp_path / "w.txt", M)
    np.testing.assert_array_equal(read_matrix(tmp_path / "w.txt"), M)
