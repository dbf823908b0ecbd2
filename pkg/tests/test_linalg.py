import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pevp_energy import linalg
from helpers import cofactor_det, match_multisets, random_unitary


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestLU:
    def test_identity(self):
        f = linalg.lu_decompose(np.eye(2))
        assert np.array_equal(f.L, np.eye(2))
        assert np.array_equal(f.U, np.eye(2))
        assert f.sign == 1

    def test_permutation_one_swap(self):
        f = linalg.lu_decompose([[0, 1], [1, 0]])
        assert f.sign == -1
        assert list(f.pivot) == [1, 0]

    def test_reconstruction(self):
        m = cgauss(np.random.default_rng(5), 5, 5)
        f = linalg.lu_decompose(m)
        assert np.linalg.norm(f.P @ m - f.L @ f.U) <= 1e-12 * np.linalg.norm(m)

    def test_singular_is_flagged_not_raised(self):
        f = linalg.lu_decompose([[1, 2], [2, 4]])
        assert f.singular
        assert f.pivot_magnitudes().min() == 0

    def test_non_square(self):
        with pytest.raises(linalg.NotSquareError):
            linalg.lu_decompose(np.ones((2, 3)))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            linalg.det([[np.nan, 0], [0, 1]])


class TestDet:
    def test_identity(self):
        assert linalg.det(np.eye(6)) == 1

    def test_diagonal(self):
        assert linalg.det(np.diag([2, 3j])) == pytest.approx(6j, abs=1e-15)

    def test_cofactor_oracle(self):
        m = cgauss(np.random.default_rng(11), 4, 4)
        ref = cofactor_det(m.tolist())
        assert abs(linalg.det(m) - ref) <= 1e-10 * abs(ref)

    def test_batch_matches_scalar(self):
        stack = cgauss(np.random.default_rng(3), 20, 3, 3)
        got = linalg.det_batch(stack)
        want = [linalg.det(m) for m in stack]
        np.testing.assert_allclose(got, want, rtol=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_permutation_sign(self, n, seed):
        rng = np.random.default_rng(seed)
        m = cgauss(rng, n, n)
        perm = rng.permutation(n)
        p = np.eye(n)[perm]
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        sign = -1 if inversions % 2 else 1
        assert linalg.det(p) == sign
        assert abs(linalg.det(p @ m) - linalg.det(p) * linalg.det(m)) <= 1e-12 * max(1, abs(linalg.det(m)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_product(self, n, seed):
        rng = np.random.default_rng(seed)
        a, b = cgauss(rng, n, n), cgauss(rng, n, n)
        want = linalg.det(a) * linalg.det(b)
        assert abs(linalg.det(a @ b) - want) <= 1e-9 * abs(want)


class TestSolve:
    def test_identity(self):
        b = np.array([1 + 2j, -3, 0.5j])
        np.testing.assert_array_equal(linalg.solve(np.eye(3), b), b)

    def test_diagonal(self):
        np.testing.assert_allclose(linalg.solve(np.diag([2, 4]), [2, 8]), [1, 2])

    def test_residual(self):
        rng = np.random.default_rng(8)
        m, b = cgauss(rng, 6, 6), cgauss(rng, 6, 2)
        x = linalg.solve(m, b)
        assert np.linalg.norm(m @ x - b) <= 1e-8 * np.linalg.norm(b)

    def test_near_singular(self):
        m = np.array([[1, 1], [1, 1 + 1e-14]])
        with pytest.raises(linalg.NearSingular) as exc:
            linalg.solve(m, [1, 1])
        assert exc.value.pivot < 1e-12 * exc.value.max_pivot

    def test_exactly_singular(self):
        with pytest.raises(linalg.NearSingular):
            linalg.solve(np.zeros((3, 3)), np.ones(3))


class TestEigenvalues:
    def test_diagonal(self):
        w = linalg.eigenvalues(np.diag([1.0, 2.0, 3.0])).eigenvalues
        assert match_multisets(w, [1, 2, 3]) < 1e-14

    def test_companion_of_z2_plus_1(self):
        w = linalg.eigenvalues([[0, -1], [1, 0]]).eigenvalues
        assert match_multisets(w, [1j, -1j]) < 1e-14

    def test_count_and_scalar(self):
        s = linalg.eigenvalues([[2 + 1j]])
        assert s.eigenvalues.shape == (1,) and s.eigenvalues[0] == 2 + 1j

    def test_determinant_residual(self):
        m = cgauss(np.random.default_rng(21), 8, 8)
        scale = np.linalg.norm(m) ** 8
        for lam in linalg.eigenvalues(m).eigenvalues:
            assert abs(np.linalg.det(m - lam * np.eye(8))) <= 1e-8 * scale

    @pytest.mark.parametrize("n", [2, 5, 12, 30, 60])
    def test_smallest_singular_value_within_bound(self, n):
        m = cgauss(np.random.default_rng(n), n, n)
        s = linalg.eigenvalues(m)
        assert s.eigenvalues.size == n
        nrm = np.linalg.norm(m)
        for lam in s.eigenvalues:
            smin = np.linalg.svd(m - lam * np.eye(n), compute_uv=False)[-1]
            assert smin / nrm <= s.residual_bound
        assert s.residual_bound < 1e-11

    @pytest.mark.parametrize("n", [3, 10, 40])
    def test_against_lapack(self, n):
        m = cgauss(np.random.default_rng(100 + n), n, n)
        assert match_multisets(linalg.eigenvalues(m).eigenvalues, np.linalg.eigvals(m)) < 1e-9

    def test_badly_scaled_needs_balancing(self):
        rng = np.random.default_rng(4)
        d = np.diag(10.0 ** rng.integers(-6, 6, size=8))
        m = np.linalg.solve(d, cgauss(rng, 8, 8) @ d)
        w = linalg.eigenvalues(m).eigenvalues
        assert match_multisets(w, np.linalg.eigvals(m)) < 1e-8 * np.abs(w).max()

    def test_repeated_eigenvalue(self):
        w = linalg.eigenvalues(np.array([[2, 1, 0], [0, 2, 1], [0, 0, 2]], dtype=complex)).eigenvalues
        assert np.all(np.abs(w - 2) < 1e-5)

    def test_zero_matrix(self):
        w = linalg.eigenvalues(np.zeros((4, 4))).eigenvalues
        assert np.all(w == 0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**32 - 1))
    def test_unitary_similarity_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        m = cgauss(rng, n, n)
        u = random_unitary(rng, n)
        a = linalg.eigenvalues(m).eigenvalues
        b = linalg.eigenvalues(u.conj().T @ m @ u).eigenvalues
        assert match_multisets(a, b) <= 1e-8 * max(1, np.abs(a).max())

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_trace_and_det(self, n, seed):
        m = cgauss(np.random.default_rng(seed), n, n)
        w = linalg.eigenvalues(m).eigenvalues
        tr = np.trace(m)
        assert abs(w.sum() - tr) <= 1e-9 * max(abs(tr), np.linalg.norm(m))
        dt = linalg.det(m)
        assert abs(np.prod(w) - dt) <= 1e-8 * abs(dt)

    def test_non_square(self):
        with pytest.raises(linalg.NotSquareError):
            linalg.eigenvalues(np.ones((3, 2)))

    def test_input_not_modified(self):
        m = cgauss(np.random.default_rng(0), 5, 5)
        keep = m.copy()
        linalg.eigenvalues(m)
        linalg.det(m)
        np.testing.assert_array_equal(m, keep)
