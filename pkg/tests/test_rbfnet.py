"""
Tests for the RBF network.
"""

import numpy as np
import pytest

from fluxgate.classifiers import RbfNetModel, TrainConfig, rbfnet_forward, rbfnet_train
from fluxgate.classifiers import rbfnet as rbfnet_module
from fluxgate.classifiers.rbfnet import center_radii, kmeans
from fluxgate.core.errors import DegenerateCenters, NonPositiveRadius, SingleClassData


class TestRbfNetModel:
    """Test the network structure."""

    def test_gaussian_response_at_center(self):
        """Test a hidden unit responds with 1 at its center."""
        centers = np.array([np.zeros(8), np.ones(8)])
        model = RbfNetModel(centers, np.array([1.0, 2.0]), np.eye(2))
        H = model.hidden(centers)
        assert H[0, 0] == 1.0 and H[1, 1] == 1.0
        assert H[0, 1] == pytest.approx(np.exp(-8.0 / 4.0))

    def test_softmax_hidden_layer(self):
        """Test the softmax variant normalizes hidden responses."""
        centers = np.array([np.zeros(8), np.ones(8), np.full(8, 2.0)])
        model = RbfNetModel(centers, np.ones(3), np.ones((3, 2)), activation="softmax")
        H = model.hidden(np.random.default_rng(0).normal(size=(4, 8)))
        assert H.sum(axis=1) == pytest.approx(np.ones(4))

    def test_decision_two_outputs(self):
        """Test the decision value is out[1] - out[0]."""
        model = RbfNetModel(np.zeros((1, 8)), np.ones(1), np.array([[0.25, 0.75]]))
        assert rbfnet_forward(model, np.zeros(8)) == pytest.approx([0.25, 0.75])
        assert model.decide(np.zeros(8)) == pytest.approx(0.5)

    def test_decision_one_output(self):
        """Test a single output is the decision value itself."""
        model = RbfNetModel(np.zeros((1, 8)), np.ones(1), np.array([-2.0]))
        assert model.decide(np.zeros(8)) == pytest.approx(-2.0)
        assert model.predict(np.zeros(8)).tolist() == [-1]

    @pytest.mark.parametrize("radius", [0.0, -0.5])
    def test_non_positive_radius(self, radius):
        """Test radii <= 0 raise NonPositiveRadius."""
        with pytest.raises(NonPositiveRadius):
            RbfNetModel(np.zeros((1, 8)), np.array([radius]), np.ones((1, 2)))

    def test_unknown_activation(self):
        """Test only gaussian and softmax hidden layers exist."""
        with pytest.raises(ValueError):
            RbfNetModel(np.zeros((1, 8)), np.ones(1), np.ones((1, 2)), activation="relu")


class TestKmeans:
    """Test center placement."""

    def test_centers_are_cluster_means(self):
        """Test each center is the mean of its assigned points."""
        rng = np.random.default_rng(1)
        X = np.vstack([rng.normal(-5, 0.3, size=(30, 8)), rng.normal(5, 0.3, size=(30, 8))])
        centers, assignments = kmeans(X, 2, rng)
        for index in range(2):
            assert centers[index] == pytest.approx(X[assignments == index].mean(axis=0))
        assert len(set(assignments[:30])) == 1 and len(set(assignments[30:])) == 1

    def test_too_few_distinct_points(self):
        """Test asking for more centers than distinct points is degenerate."""
        X = np.vstack([np.zeros((5, 8)), np.ones((5, 8))])
        with pytest.raises(DegenerateCenters):
            kmeans(X, 3, np.random.default_rng(0))

    def test_radii_nearest_center(self):
        """Test each radius is the distance to the nearest other center."""
        centers = np.array([[0.0] * 8, [3.0] + [0.0] * 7, [10.0] + [0.0] * 7])
        radii = center_radii(centers, centers, np.arange(3))
        assert radii == pytest.approx([3.0, 3.0, 7.0])


class TestRbfNetTrain:
    """Test RBF network training."""

    @pytest.mark.parametrize("activation", ["gaussian", "softmax"])
    def test_learns_blobs(self, blobs, activation):
        """Test separated blobs are learned with either hidden activation."""
        X, y = blobs
        model = rbfnet_train(X, y, TrainConfig(rbf_activation=activation, n_centers=10))
        assert model.activation == activation
        assert np.mean(model.predict(X) == y) >= 0.99

    def test_interpolates_with_one_center_per_point(self):
        """Test one center per distinct point reproduces the training labels."""
        rng = np.random.default_rng(2)
        X = rng.uniform(0, 1, size=(12, 8))
        y = np.array([1, -1] * 6)
        model = rbfnet_train(X, y, TrainConfig(n_centers=12, ridge=1e-10))
        assert np.array_equal(model.predict(X), y)

    def test_centers_capped_by_distinct_rows(self):
        """Test the center count never exceeds the number of distinct inputs."""
        X = np.repeat(np.eye(8)[:3], 4, axis=0)
        y = np.array([-1] * 4 + [1] * 8)
        model = rbfnet_train(X, y, TrainConfig(n_centers=20))
        assert len(model.centers) == 3

    def test_reseeds_then_gives_up(self, blobs, monkeypatch):
        """Test degenerate k-means is retried max_restarts times before failing."""
        X, y = blobs
        calls = []

        def always_degenerate(X, k, rng):
            calls.append(k)
            raise DegenerateCenters("collapsed")

        monkeypatch.setattr(rbfnet_module, "kmeans", always_degenerate)
        with pytest.raises(DegenerateCenters):
            rbfnet_train(X, y, TrainConfig(max_restarts=2))
        assert len(calls) == 3

    def test_single_class(self):
        """Test one-label data raises SingleClassData."""
        with pytest.raises(SingleClassData):
            rbfnet_train(np.random.default_rng(0).normal(size=(5, 8)), np.ones(5))

    def test_payload_round_trip(self, blobs):
        """Test a network survives to_payload/from_payload."""
        X, y = blobs
        model = rbfnet_train(X, y, TrainConfig(n_centers=5))
        restored = RbfNetModel.from_payload(model.to_payload())
        assert np.array_equal(restored.decision_function(X), model.decision_function(X))
