"""
Tests for the SMO-trained support vector machine.
"""

import numpy as np
import pytest

from fluxgate.classifiers import Kernel, SvmModel, TrainConfig, dual_objective, svm_decision, svm_train
from fluxgate.classifiers import svm as svm_module
from fluxgate.classifiers.svm import geometric_margin, hard_margin_train
from fluxgate.core.errors import EmptyTrainingSet, SingleClassData, TrainingError

from .conftest import make_blobs


def pad(X2):
    """Embed 2-D points in the 8-D feature space."""
    return np.hstack([X2, np.zeros((X2.shape[0], 6))])


def kkt_margins(model, X, y):
    return y * model.decision_function(X)


class TestSvmTrain:
    """Test SMO training."""

    def test_separable_blobs(self, blobs):
        """Test well separated blobs are classified perfectly."""
        X, y = blobs
        model = svm_train(X, y)
        assert model.converged
        assert np.array_equal(model.predict(X), y)

        X_new, y_new = make_blobs(n=100, seed=5)
        assert np.mean(model.predict(X_new) == y_new) >= 0.98

    def test_constraints(self):
        """Test box and equality constraints hold on the solution."""
        X, y = make_blobs(n=120, separation=0.6, seed=2)
        cfg = TrainConfig(C=2.0)
        model = svm_train(X, y, cfg)
        alphas = model.full_alphas(len(y))
        assert np.all(alphas >= 0.0)
        assert np.all(alphas <= cfg.C)
        assert float(np.dot(alphas, y)) == pytest.approx(0.0, abs=1e-8)
        assert model.n_support == int(np.sum(alphas > 0))

    def test_kkt_conditions(self):
        """Test every multiplier satisfies its KKT condition within tolerance."""
        X, y = make_blobs(n=120, separation=0.6, seed=3)
        cfg = TrainConfig(C=2.0, tolerance=1e-4)
        model = svm_train(X, y, cfg)
        assert model.converged
        alphas = model.full_alphas(len(y))
        margins = kkt_margins(model, X, y)
        slack = 1e-3
        assert np.all(margins[alphas == 0] >= 1 - slack)
        free = (alphas > 0) & (alphas < cfg.C)
        assert np.all(np.abs(margins[free] - 1) <= slack)
        assert np.all(margins[alphas >= cfg.C] <= 1 + slack)
        assert np.any(alphas >= cfg.C - 1e-9)

    @pytest.mark.parametrize("kernel", ["rbf", "linear"])
    def test_kkt_gap_on_random_problems(self, kernel):
        """Test SMO converges to a KKT gap within tolerance on many noisy random problems."""
        for seed in range(25):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(20, 51))
            X = rng.uniform(0.0, 1.0, size=(n, 8))
            y = np.where(X[:, 0] + X[:, 1] + rng.normal(0.0, 0.3, size=n) > 1.0, 1, -1)
            y[0], y[1] = 1, -1
            C = float(rng.choice([1.0, 10.0]))
            cfg = TrainConfig(C=C, kernel=kernel, max_passes=200)
            model = svm_train(X, y, cfg)
            assert model.converged, f"seed {seed} did not converge"

            alphas = model.full_alphas(n)
            assert np.all((alphas >= 0.0) & (alphas <= C))
            assert float(np.dot(alphas, y)) == pytest.approx(0.0, abs=1e-8)
            errors = model.decision_function(X) - model.bias - y
            up, low = svm_module._working_sets(alphas, y > 0, C)
            gap = np.max(-errors[up]) - np.min(-errors[low])
            assert gap <= cfg.tolerance + 1e-9, f"seed {seed}: gap {gap}"

    def test_dual_optimal_against_feasible_points(self):
        """Test no feasible multiplier vector has a higher dual objective."""
        X, y = make_blobs(n=60, separation=0.8, seed=4)
        cfg = TrainConfig(C=1.0, tolerance=1e-8, max_passes=500)
        model = svm_train(X, y, cfg)
        kernel = Kernel.from_config(cfg)
        alphas = model.full_alphas(len(y))
        best = dual_objective(alphas, X, y, kernel)

        rng = np.random.default_rng(9)
        positive = y > 0
        for _ in range(20):
            r = rng.uniform(0, cfg.C, size=len(y))
            total = min(r[positive].sum(), r[~positive].sum())
            beta = np.where(positive, r * total / r[positive].sum(), r * total / r[~positive].sum())
            assert dual_objective(beta, X, y, kernel) <= best + 1e-7
            for t in (0.01, 0.1, 0.5):
                mixed = (1 - t) * alphas + t * beta
                assert dual_objective(mixed, X, y, kernel) <= best + 1e-7

    def test_conflicting_duplicates_at_bound(self):
        """Test an identical point carrying both labels pins both multipliers at C."""
        X = pad(np.array([[0.0, 0.0], [0.0, 0.0], [2.0, 0.0], [-2.0, 0.0]]))
        y = np.array([1, -1, 1, -1])
        cfg = TrainConfig(C=1.0, gamma=0.5, tolerance=1e-6)
        alphas = svm_train(X, y, cfg).full_alphas(4)
        assert alphas[0] == pytest.approx(cfg.C, rel=1e-4)
        assert alphas[1] == pytest.approx(cfg.C, rel=1e-4)

    def test_column_cache_matches_full_gram(self, monkeypatch):
        """Test training through the column cache reproduces the full-Gram solution."""
        X, y = make_blobs(n=80, separation=0.8, seed=6)
        full = svm_train(X, y)
        monkeypatch.setattr(svm_module, "FULL_GRAM_LIMIT", 10)
        cached = svm_train(X, y)
        assert cached.n_support == full.n_support
        assert cached.decision_function(X) == pytest.approx(full.decision_function(X), rel=1e-9, abs=1e-12)

    def test_non_convergence_returns_last_iterate(self):
        """Test running out of steps still returns a usable model."""
        X, y = make_blobs(n=200, separation=0.2, seed=7)
        model = svm_train(X, y, TrainConfig(max_passes=1, tolerance=1e-10))
        assert not model.converged
        assert model.iterations <= 200
        assert model.predict(X).shape == (200,)

    def test_linear_kernel(self, blobs):
        """Test the linear kernel exposes primal weights agreeing with the dual form."""
        X, y = blobs
        model = svm_train(X, y, TrainConfig(kernel="linear"))
        w = model.primal_weights()
        assert X @ w + model.bias == pytest.approx(model.decision_function(X))

    def test_polynomial_kernel(self):
        """Test the polynomial kernel separates scaled blobs."""
        X, y = make_blobs(n=120, seed=8)
        X = (X - X.min(axis=0)) / (X.max(axis=0) - X.min(axis=0))
        model = svm_train(X, y, TrainConfig(kernel="poly", gamma=0.5, coef0=1.0, degree=2))
        assert model.kernel.name == "poly" and model.kernel.degree == 2
        assert np.mean(model.predict(X) == y) >= 0.95

    def test_sigmoid_kernel(self):
        """Test the sigmoid kernel trains a feasible model on scaled blobs."""
        X, y = make_blobs(n=120, seed=9)
        X = (X - X.min(axis=0)) / (X.max(axis=0) - X.min(axis=0))
        cfg = TrainConfig(kernel="sigmoid", gamma=0.1, C=1.0)
        model = svm_train(X, y, cfg)
        alphas = model.full_alphas(len(y))
        assert np.all((alphas >= 0.0) & (alphas <= cfg.C))
        assert float(np.dot(alphas, y)) == pytest.approx(0.0, abs=1e-8)
        assert np.mean(model.predict(X) == y) >= 0.9

    def test_xor_needs_kernel(self):
        """Test the XOR pattern is solved exactly with the RBF kernel."""
        X = pad(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]))
        y = np.array([-1, -1, 1, 1])
        model = svm_train(X, y, TrainConfig(C=10.0, gamma=1.0))
        assert np.array_equal(model.predict(X), y)
        assert abs(float(np.dot(model.full_alphas(4), y))) <= 1e-6

    def test_single_class(self):
        """Test one-label data raises SingleClassData."""
        with pytest.raises(SingleClassData):
            svm_train(np.ones((4, 8)), np.ones(4))
        assert issubclass(SingleClassData, TrainingError)

    def test_empty(self):
        """Test empty data raises EmptyTrainingSet."""
        with pytest.raises(EmptyTrainingSet):
            svm_train(np.empty((0, 8)), np.empty(0))


class TestPairUpdate:
    """Test the clipped two-multiplier step."""

    def test_same_sign_clips_onto_upper_bound(self):
        """Test a step past C lands exactly on C and keeps the pair sum."""
        a_i, a_j = svm_module._clip_pair(0.5, 0.9, True, 0.3, 1.0)
        assert a_j == 1.0
        assert a_i + a_j == pytest.approx(1.4)

    def test_opposite_sign_clips_onto_zero(self):
        """Test a step below 0 lands exactly on 0 and keeps the pair difference."""
        a_i, a_j = svm_module._clip_pair(0.2, 0.1, False, -0.5, 1.0)
        assert a_j == 0.0
        assert a_i - a_j == pytest.approx(0.1)

    def test_snap_to_bounds(self):
        """Test float residue next to a bound is rounded onto it."""
        assert svm_module._snap(2.2e-16, 1.0) == 0.0
        assert svm_module._snap(10.0 - 1e-14, 10.0) == 10.0
        assert svm_module._snap(0.5, 1.0) == 0.5


class TestSvmDecision:
    """Test decisions of a trained model."""

    def test_tie_goes_to_fastflux(self):
        """Test a decision value of exactly 0 predicts -1."""
        model = SvmModel(
            support_vectors=pad(np.array([[1.0, 0.0], [-1.0, 0.0]])),
            alphas=np.array([0.5, 0.5]),
            labels=np.array([1, -1]),
            bias=0.0,
            kernel=Kernel("rbf", 0.125),
            C=1.0,
        )
        origin = np.zeros(8)
        assert svm_decision(model, origin) == 0.0
        assert model.predict(origin).tolist() == [-1]

    def test_symmetric_pair(self):
        """Test two mirrored points train to equal multipliers and a zero offset."""
        X = pad(np.array([[1.0, 0.0], [-1.0, 0.0]]))
        model = svm_train(X, np.array([1, -1]))
        assert model.alphas[0] == pytest.approx(model.alphas[1])
        assert model.bias == pytest.approx(0.0, abs=1e-12)
        assert svm_decision(model, X[0]) == pytest.approx(1.0, abs=1e-6)
        assert model.predict(np.zeros(8)).tolist() == [-1]

    def test_sign_matches_decision(self, blobs):
        """Test predicted labels follow the sign of the decision value."""
        X, y = blobs
        model = svm_train(X, y)
        scores = model.decision_function(X)
        assert np.array_equal(model.predict(X), np.where(scores > 0, 1, -1))

    def test_decision_independent_of_batch(self, blobs):
        """Test scoring one row alone equals scoring it within a batch."""
        X, y = blobs
        model = svm_train(X, y)
        assert svm_decision(model, X[17]) == pytest.approx(model.decision_function(X)[17], rel=1e-12)

    def test_decision_invariant_to_support_order(self):
        """Test shuffling the support vectors leaves every decision value unchanged."""
        X, y = make_blobs(n=120, separation=0.6, seed=10)
        model = svm_train(X, y, TrainConfig(C=2.0))
        rng = np.random.default_rng(3)
        queries = rng.normal(0.0, 2.0, size=(30, 8))
        for _ in range(5):
            order = rng.permutation(model.n_support)
            shuffled = SvmModel(
                support_vectors=model.support_vectors[order],
                alphas=model.alphas[order],
                labels=model.labels[order],
                bias=model.bias,
                kernel=model.kernel,
                C=model.C,
            )
            for x in queries:
                assert svm_decision(shuffled, x) == pytest.approx(svm_decision(model, x), rel=1e-9, abs=1e-12)


class TestHardMargin:
    """Test the hard-margin limit against a brute-force margin search."""

    def test_margin_matches_angle_search(self):
        """Test the maximal geometric margin agrees with a dense angle grid."""
        rng = np.random.default_rng(12)
        X2 = np.vstack([rng.normal(2.0, 0.5, size=(10, 2)), rng.normal(-2.0, 0.5, size=(10, 2))])
        y = np.array([1] * 10 + [-1] * 10)

        model = hard_margin_train(pad(X2), y)
        margin = geometric_margin(model, pad(X2), y)

        angles = np.linspace(0.0, 2.0 * np.pi, 100000, endpoint=False)
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        projections = X2 @ directions.T
        gaps = projections[y > 0].min(axis=0) - projections[y < 0].max(axis=0)
        oracle = gaps.max() / 2.0

        assert oracle > 0
        assert margin == pytest.approx(oracle, rel=1e-3)
        assert np.array_equal(model.predict(pad(X2)), y)

    def test_rbf_has_no_primal_weights(self, blobs):
        """Test primal weights are refused for the RBF kernel."""
        X, y = blobs
        with pytest.raises(ValueError):
            svm_train(X, y).primal_weights()
