import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from nhtopo.errors import ConvergenceFailure, DimensionMismatch, NonFiniteInput, NotAntisymmetric, OddDimension
from nhtopo.linalg import eigendecompose, lexsort_complex, max_norm, pfaffian, propagator

from conftest import random_antisymmetric, random_complex


def lu_det(A):
    """Determinant from an LU factorization, independent of the Pfaffian code."""
    lu, piv = sla.lu_factor(A)
    sign = (-1) ** int(np.sum(piv != np.arange(A.shape[0])))
    return sign * np.prod(np.diag(lu))


class TestEigendecompose:
    def test_diagonal(self):
        s = eigendecompose(np.diag([3.0, 1j, -2.0]))
        np.testing.assert_allclose(s.eigenvalues, [-2.0, 1j, 3.0])
        assert not s.defective_flag
        assert s.biorthogonality_error() < 1e-14

    def test_characteristic_polynomial_oracle(self):
        H = np.array(
            [[1, 2j, 0, 0.5], [0.3, -1j, 1, 0], [0, 1, 2, 1j], [1, 0, -0.5, 0.2j]], dtype=complex
        )
        # coefficients by Faddeev-LeVerrier, roots by the companion matrix
        n = 4
        M = np.zeros_like(H)
        c = [1.0 + 0j]
        for k in range(1, n + 1):
            M = H @ M + c[-1] * np.eye(n)
            c.append(-np.trace(H @ M) / k)
        oracle = np.roots(c)
        got = eigendecompose(H).eigenvalues
        np.testing.assert_allclose(np.sort_complex(got), np.sort_complex(oracle), atol=1e-10)

    def test_sorted_lexicographically(self, rng):
        s = eigendecompose(random_complex(rng, 12))
        assert np.array_equal(lexsort_complex(s.eigenvalues), np.arange(12))

    def test_jordan_block_flagged(self):
        s = eigendecompose(np.array([[0, 1], [0, 0]], dtype=complex))
        assert s.defective_flag
        assert s.condition > 1e8

    def test_left_vectors_are_left_eigenvectors(self, rng):
        H = random_complex(rng, 10)
        s = eigendecompose(H)
        for n in range(10):
            chi = s.left_vectors[:, n]
            np.testing.assert_allclose(chi.conj() @ H, s.eigenvalues[n] * chi.conj(), atol=1e-9)

    def test_hermitian_left_equals_right(self, rng):
        A = random_complex(rng, 6)
        s = eigendecompose(A + A.conj().T)
        np.testing.assert_allclose(np.abs(s.left_vectors), np.abs(s.right_vectors), atol=1e-10)

    @pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros(4), np.zeros((0, 0))])
    def test_shape_errors(self, bad):
        with pytest.raises(DimensionMismatch):
            eigendecompose(bad)

    def test_nonfinite(self):
        with pytest.raises(NonFiniteInput):
            eigendecompose(np.array([[np.nan, 0], [0, 1]]))

    def test_convergence_failure_is_wrapped(self, monkeypatch):
        import nhtopo.linalg as L

        def boom(*a, **k):
            raise np.linalg.LinAlgError("no convergence")

        monkeypatch.setattr(L.sla, "eig", boom)
        with pytest.raises(ConvergenceFailure):
            L.eigendecompose(np.eye(2))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 64), st.integers(0, 2**32 - 1))
    def test_residual_property(self, n, seed):
        H = random_complex(np.random.default_rng(seed), n)
        s = eigendecompose(H)
        assert s.residual_max < 1e-8 * max_norm(H) * n
        if not s.defective_flag:
            assert s.biorthogonality_error() < 1e-8


class TestPfaffian:
    def test_two_by_two(self):
        assert pfaffian(np.array([[0, 2.5], [-2.5, 0]])) == pytest.approx(2.5)

    def test_four_by_four_formula(self):
        a, b, c, d, e, f = 1.0, 2j, -0.5, 3.0, 0.7, -1j
        A = np.array([[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]])
        assert pfaffian(A) == pytest.approx(a * f - b * e + c * d)

    def test_block_diagonal_product(self):
        J = np.array([[0, 1], [-1, 0]])
        A = sla.block_diag(2 * J, -3 * J, 0.5j * J)
        assert pfaffian(A) == pytest.approx(2 * -3 * 0.5j)

    def test_errors(self, rng):
        with pytest.raises(NotAntisymmetric):
            pfaffian(np.eye(2))
        with pytest.raises(OddDimension):
            pfaffian(np.zeros((3, 3)))

    def test_singular_returns_zero(self):
        assert pfaffian(np.zeros((4, 4))) == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 16), st.integers(0, 2**32 - 1))
    def test_square_is_determinant(self, half, seed):
        A = random_antisymmetric(np.random.default_rng(seed), 2 * half)
        pf = pfaffian(A)
        det = lu_det(A)
        assert abs(pf**2 - det) <= 1e-10 * max(1.0, abs(det))

    def test_congruence(self, rng):
        A = random_antisymmetric(rng, 6)
        B = random_complex(rng, 6)
        assert pfaffian(B @ A @ B.T) == pytest.approx(lu_det(B) * pfaffian(A), rel=1e-9)


class TestPropagator:
    def test_paths_agree(self, rng):
        H = random_complex(rng, 8, 0.3)
        np.testing.assert_allclose(propagator(H, 1.7, method="eigen"), propagator(H, 1.7, method="pade"), atol=1e-9)

    def test_defective_falls_back(self):
        J = np.array([[0.5j, 1], [0, 0.5j]])
        U = propagator(J, 2.0)
        np.testing.assert_allclose(U, sla.expm(-2j * J), atol=1e-12)
        with pytest.raises(ConvergenceFailure):
            propagator(J, 2.0, method="eigen")

    def test_unitary_for_hermitian(self, rng):
        A = random_complex(rng, 6)
        U = propagator(A + A.conj().T, 3.0)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(6), atol=1e-10)

    def test_bad_inputs(self):
        with pytest.raises(NonFiniteInput):
            propagator(np.eye(2), np.inf)
        with pytest.raises(ValueError):
            propagator(np.eye(2), 1.0, method="taylor")
