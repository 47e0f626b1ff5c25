import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from oblique_kaczmarz.linalg import (
    ShapeError,
    SparseRowMatrix,
    ZeroRowError,
    normalize_rows,
    residual,
    row_dot,
    row_pair_dot,
)

L = SparseRowMatrix.from_dense([[1.0, 0.0], [1.0, 1.0]])


def random_matrix(rng, m, n, density=0.5):
    a = rng.standard_normal((m, n)) * (rng.random((m, n)) < density)
    a[np.arange(m), rng.integers(n, size=m)] = rng.standard_normal(m) + 3.0
    return a


class TestRowDot:
    def test_identity_row(self):
        assert row_dot(SparseRowMatrix.from_dense(np.eye(2)), 0, [3.0, 7.0]) == 3.0

    def test_hand_expansion(self):
        assert row_dot(L, 1, [1.0, 0.0]) == 1.0

    def test_zero_vector(self):
        A = SparseRowMatrix.from_dense(random_matrix(np.random.default_rng(0), 5, 4))
        assert all(row_dot(A, i, np.zeros(4)) == 0.0 for i in range(5))

    def test_errors(self):
        with pytest.raises(IndexError):
            row_dot(L, 2, [1.0, 0.0])
        with pytest.raises(ShapeError):
            row_dot(L, 0, [1.0, 0.0, 0.0])


class TestRowPairDot:
    def test_orthogonal(self):
        assert row_pair_dot(SparseRowMatrix.from_dense(np.eye(3)), 0, 1) == 0.0

    def test_hand_expansion(self):
        assert row_pair_dot(L, 0, 1) == 1.0

    def test_self_is_norm(self):
        rng = np.random.default_rng(1)
        A = SparseRowMatrix.from_dense(random_matrix(rng, 20, 15, 0.3))
        for i in range(20):
            assert row_pair_dot(A, i, i) == pytest.approx(A.row_norms_sq[i], rel=1e-12)

    def test_matches_dense(self):
        rng = np.random.default_rng(2)
        a = random_matrix(rng, 12, 9, 0.4)
        A = SparseRowMatrix.from_dense(a)
        G = a @ a.T
        for i in range(12):
            for j in range(12):
                assert row_pair_dot(A, i, j) == pytest.approx(G[i, j], rel=1e-12, abs=1e-14)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            row_pair_dot(L, 0, 5)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.floats(0.05, 1.0), st.integers(0, 2**32 - 1))
def test_cauchy_schwarz(m, n, dens, seed):
    A = SparseRowMatrix.from_dense(random_matrix(np.random.default_rng(seed), m, n, dens))
    M = A.row_norms_sq
    for i in range(m):
        for j in range(m):
            assert row_pair_dot(A, i, j) ** 2 <= M[i] * M[j] * (1 + 1e-12)


class TestConstruction:
    def test_norm_caches(self):
        a = random_matrix(np.random.default_rng(3), 30, 7)
        A = SparseRowMatrix.from_dense(a)
        np.testing.assert_allclose(A.row_norms_sq, (a * a).sum(axis=1), rtol=1e-12)
        assert A.frob_sq == pytest.approx(A.row_norms_sq.sum(), rel=1e-12)

    def test_duplicates_summed(self):
        A = SparseRowMatrix.from_triplets([0, 0, 1], [1, 1, 0], [2.0, 3.0, 1.0], (2, 2))
        np.testing.assert_array_equal(A.to_dense(), [[0.0, 5.0], [1.0, 0.0]])

    def test_columns_sorted(self):
        A = SparseRowMatrix.from_triplets([0, 0, 0], [2, 0, 1], [1.0, 2.0, 3.0], (1, 3))
        np.testing.assert_array_equal(A.col_indices, [0, 1, 2])
        np.testing.assert_array_equal(A.values, [2.0, 3.0, 1.0])

    def test_zero_row_rejected(self):
        with pytest.raises(ZeroRowError) as exc:
            SparseRowMatrix.from_dense([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        assert exc.value.row == 1

    def test_explicit_zero_values_rejected(self):
        with pytest.raises(ZeroRowError):
            SparseRowMatrix.from_triplets([0, 1], [0, 0], [1.0, 0.0], (2, 1))

    def test_unsorted_raw_rejected(self):
        with pytest.raises(ValueError):
            SparseRowMatrix(1, 3, [0, 2], [2, 1], [1.0, 1.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            SparseRowMatrix.from_dense([[np.nan, 1.0]])

    def test_immutable(self):
        with pytest.raises(ValueError):
            L.values[0] = 2.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_triplet_round_trip(self, m, n, seed):
        rng = np.random.default_rng(seed)
        cells = rng.permutation(m * n)[: rng.integers(1, m * n + 1)]
        # every row needs a nonzero entry
        cells = np.union1d(cells, np.arange(m) * n + rng.integers(n, size=m))
        rows, cols = cells // n, cells % n
        vals = rng.uniform(0.5, 2.0, cells.size) * rng.choice([-1, 1], cells.size)
        A = SparseRowMatrix.from_triplets(rows, cols, vals, (m, n))
        got = set(zip(*(x.tolist() for x in A.triplets())))
        assert got == set(zip(rows.tolist(), cols.tolist(), vals.tolist()))


class TestNormalizeRows:
    def test_3_4_5(self):
        A, b = normalize_rows(SparseRowMatrix.from_dense([[3.0, 4.0]]), [10.0])
        np.testing.assert_allclose(A.to_dense(), [[0.6, 0.8]], rtol=1e-15)
        np.testing.assert_allclose(b, [2.0], rtol=1e-15)

    def test_idempotent(self):
        a = random_matrix(np.random.default_rng(4), 10, 6)
        A1, b1 = normalize_rows(SparseRowMatrix.from_dense(a), np.arange(10.0))
        A2, b2 = normalize_rows(A1, b1)
        np.testing.assert_allclose(A2.values, A1.values, rtol=0, atol=1e-15)
        np.testing.assert_allclose(b2, b1, rtol=0, atol=1e-14)

    def test_identity_unchanged(self):
        A, b = normalize_rows(SparseRowMatrix.from_dense(np.eye(3)), [1.0, -2.0, 5.0])
        np.testing.assert_array_equal(A.to_dense(), np.eye(3))
        np.testing.assert_array_equal(b, [1.0, -2.0, 5.0])

    def test_unit_norms_and_solution_set(self):
        rng = np.random.default_rng(5)
        a = random_matrix(rng, 15, 8)
        x = rng.standard_normal(8)
        A, b = normalize_rows(SparseRowMatrix.from_dense(a), a @ x)
        np.testing.assert_allclose(A.row_norms_sq, 1.0, atol=1e-12)
        np.testing.assert_allclose(residual(A, b, x), 0.0, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_residual_sign_pattern(self, seed):
        rng = np.random.default_rng(seed)
        a = random_matrix(rng, 9, 5)
        b = rng.standard_normal(9)
        x = rng.standard_normal(5)
        A = SparseRowMatrix.from_dense(a)
        An, bn = normalize_rows(A, b)
        r, rn = residual(A, b, x), residual(An, bn, x)
        keep = np.abs(r) > 1e-12
        np.testing.assert_array_equal(np.sign(r[keep]), np.sign(rn[keep]))


class TestResidual:
    def test_exact_solution(self):
        a = random_matrix(np.random.default_rng(6), 6, 6)
        x = np.arange(6.0)
        np.testing.assert_allclose(residual(SparseRowMatrix.from_dense(a), a @ x, x), 0.0, atol=1e-12)

    def test_zero_iterate(self):
        np.testing.assert_array_equal(residual(L, [1.0, 2.0], [0.0, 0.0]), [1.0, 2.0])

    def test_hand_expansion(self):
        np.testing.assert_array_equal(residual(L, [1.0, 2.0], [1.0, 0.0]), [0.0, 1.0])

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            residual(L, [1.0, 2.0, 3.0], [0.0, 0.0])
        with pytest.raises(ShapeError):
            residual(L, [1.0, 2.0], [0.0])


@given(hnp.arrays(np.float64, (4, 3), elements=st.floats(-10, 10)).filter(
    lambda a: np.all(np.abs(a).sum(axis=1) > 1e-3)))
@settings(max_examples=40, deadline=None)
def test_dense_round_trip(a):
    np.testing.assert_array_equal(SparseRowMatrix.from_dense(a).to_dense(), a)
