"""
Tests for activation and kernel functions.
"""

import numpy as np
import pytest

from fluxgate.classifiers import Kernel, gaussian_basis, rbf_kernel, softmax
from fluxgate.classifiers.kernels import polynomial_kernel, sigmoid, sigmoid_kernel, squared_distances
from fluxgate.core.errors import NonPositiveRadius


class TestSoftmax:
    """Test the overflow-safe softmax."""

    def test_sums_to_one(self):
        """Test rows are probability vectors."""
        out = softmax(np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]), axis=1)
        assert out.sum(axis=1) == pytest.approx([1.0, 1.0])
        assert out[1] == pytest.approx([1 / 3] * 3)

    def test_large_inputs(self):
        """Test huge logits neither overflow nor produce NaN."""
        out = softmax(np.array([1000.0, 1001.0]))
        assert np.all(np.isfinite(out))
        assert out[1] == pytest.approx(1.0 / (1.0 + np.exp(-1.0)))

    def test_shift_invariant(self):
        """Test adding a constant leaves the output unchanged."""
        a = np.array([0.3, -1.2, 2.5])
        assert softmax(a + 40.0) == pytest.approx(softmax(a))


class TestSigmoid:
    """Test the logistic function."""

    def test_extremes(self):
        """Test saturated inputs stay finite and in range."""
        out = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        assert out == pytest.approx([0.0, 0.5, 1.0])


class TestGaussianBasis:
    """Test the Gaussian basis function."""

    def test_center_is_one(self):
        """Test the response at the center is 1."""
        assert gaussian_basis(np.ones(8), np.ones(8), 0.5) == 1.0

    def test_scalar_value(self):
        """Test exp(-d^2/r^2) on scalars."""
        assert gaussian_basis(3.0, 1.0, 2.0) == pytest.approx(np.exp(-1.0))

    @pytest.mark.parametrize("radius", [0.0, -1.0])
    def test_non_positive_radius(self, radius):
        """Test radii <= 0 raise NonPositiveRadius."""
        with pytest.raises(NonPositiveRadius):
            gaussian_basis(1.0, 0.0, radius)


class TestKernel:
    """Test kernel evaluation."""

    def test_rbf_value(self):
        """Test exp(-gamma ||x1 - x2||^2)."""
        x1, x2 = np.zeros(8), np.full(8, 0.5)
        assert rbf_kernel(x1, x2, 0.125) == pytest.approx(np.exp(-0.25))
        assert Kernel("rbf", 0.125)(x1, x2) == pytest.approx(np.exp(-0.25))

    def test_linear_value(self):
        """Test the linear kernel is the dot product."""
        assert Kernel("linear")(np.array([1.0, 2.0]), np.array([3.0, -1.0])) == 1.0

    def test_matrix_matches_pairwise(self):
        """Test the kernel matrix agrees with pairwise evaluation."""
        rng = np.random.default_rng(0)
        A, B = rng.normal(size=(5, 8)), rng.normal(size=(4, 8))
        kernel = Kernel("rbf", 0.3)
        expected = np.array([[kernel(a, b) for b in B] for a in A])
        assert kernel.matrix(A, B) == pytest.approx(expected)

    def test_matrix_rows_independent_of_batch(self):
        """Test a row's values do not depend on which other rows are scored."""
        rng = np.random.default_rng(1)
        A, B = rng.normal(size=(6, 8)), rng.normal(size=(10, 8))
        kernel = Kernel("rbf", 0.5)
        assert np.array_equal(kernel.matrix(A, B)[3], kernel.matrix(A[3:4], B)[0])

    def test_gram_symmetric(self):
        """Test Gram matrices are exactly symmetric with unit diagonal for RBF."""
        X = np.random.default_rng(2).normal(size=(7, 8))
        K = Kernel("rbf", 0.2).gram(X)
        assert np.array_equal(K, K.T)
        assert np.diag(K) == pytest.approx(np.ones(7))

    def test_invalid(self):
        """Test unknown kernels, non-positive gamma and bad degrees are rejected."""
        with pytest.raises(ValueError):
            Kernel("laplace")
        with pytest.raises(ValueError):
            Kernel("rbf", 0.0)
        with pytest.raises(ValueError):
            Kernel("poly", 0.5, degree=0)

    def test_polynomial_value(self):
        """Test (gamma <x1, x2> + coef0) ** degree."""
        x1, x2 = np.array([1.0, 2.0]), np.array([3.0, -1.0])
        assert Kernel("poly", 0.5, coef0=1.0, degree=2)(x1, x2) == pytest.approx(2.25)
        assert polynomial_kernel(x1, x2, 0.5, 1.0, 3) == pytest.approx(3.375)

    def test_sigmoid_value(self):
        """Test tanh(gamma <x1, x2> + coef0)."""
        x1, x2 = np.array([1.0, 2.0]), np.array([3.0, -1.0])
        assert Kernel("sigmoid", 0.5, coef0=-0.5)(x1, x2) == pytest.approx(0.0)
        assert sigmoid_kernel(x1, x2, 1.0) == pytest.approx(np.tanh(1.0))

    @pytest.mark.parametrize("name", ["rbf", "linear", "poly", "sigmoid"])
    def test_matrix_and_diagonal_match_pairwise(self, name):
        """Test every kernel's matrix and diagonal agree with pairwise evaluation."""
        rng = np.random.default_rng(3)
        X = rng.uniform(0, 1, size=(6, 8))
        kernel = Kernel(name, 0.25, coef0=0.5, degree=2)
        expected = np.array([[kernel(a, b) for b in X] for a in X])
        assert kernel.matrix(X, X) == pytest.approx(expected)
        assert kernel.diagonal(X) == pytest.approx(np.diag(expected))

    def test_dict_round_trip(self):
        """Test kernels survive to_dict/from_dict."""
        for kernel in (Kernel("rbf", 0.125), Kernel("poly", 0.5, coef0=1.0, degree=2)):
            assert Kernel.from_dict(kernel.to_dict()) == kernel

    def test_squared_distances_non_negative(self):
        """Test cancellation never yields negative distances."""
        X = np.full((3, 8), 1e8)
        assert np.all(squared_distances(X, X) >= 0.0)


def test_gram_positive_semidefinite():
    """Test RBF Gram matrices of random samples have no negative eigenvalues."""
    rng = np.random.default_rng(4)
    for _ in range(100):
        X = rng.uniform(0, 1, size=(50, 8))
        gamma = float(rng.choice([0.01, 0.125, 1.0, 10.0]))
        assert np.linalg.eigvalsh(Kernel("rbf", gamma).gram(X)).min() >= -1e-8
