"""
Tests for the multilayer perceptron.
"""

import numpy as np
import pytest

from fluxgate.classifiers import MlpModel, TrainConfig, mlp_forward, mlp_train
from fluxgate.classifiers import mlp as mlp_module
from fluxgate.classifiers.mlp import Layer, init_network, mlp_gradients, mlp_loss, one_hot
from fluxgate.core.errors import DivergedLoss, SingleClassData


def numeric_gradient(model, X, y, param, eps=1e-6):
    grad = np.zeros_like(param)
    for index in np.ndindex(param.shape):
        original = param[index]
        param[index] = original + eps
        plus = mlp_loss(model, X, y)
        param[index] = original - eps
        minus = mlp_loss(model, X, y)
        param[index] = original
        grad[index] = (plus - minus) / (2 * eps)
    return grad


class TestGradients:
    """Test backpropagation against finite differences."""

    @pytest.mark.parametrize("sizes", [[8, 4, 2], [8, 5, 3, 2]])
    def test_gradient_check(self, sizes):
        """Test analytic gradients match central differences."""
        rng = np.random.default_rng(0)
        model = init_network(sizes, rng)
        for layer in model.layers:
            layer.b[:] = rng.normal(scale=0.1, size=layer.b.shape)
        X = rng.normal(size=(10, 8))
        y = rng.choice([-1, 1], size=10)

        analytic = [g for pair in mlp_gradients(model, X, y) for g in pair]
        for param, grad in zip(model.parameters(), analytic):
            numeric = numeric_gradient(model, X, y, param)
            error = np.linalg.norm(numeric - grad) / max(np.linalg.norm(numeric) + np.linalg.norm(grad), 1e-12)
            assert error < 1e-4

    def test_one_hot(self):
        """Test fast-flux is class 0 and legitimate class 1."""
        assert one_hot(np.array([-1, 1])).tolist() == [[1.0, 0.0], [0.0, 1.0]]


class TestMlpModel:
    """Test the network structure."""

    def test_forward_probabilities(self):
        """Test outputs are probability pairs."""
        model = init_network([8, 6, 2], np.random.default_rng(1))
        out = model.forward(np.random.default_rng(2).normal(size=(5, 8)))
        assert out.shape == (5, 2)
        assert out.sum(axis=1) == pytest.approx(np.ones(5))
        assert mlp_forward(model, np.zeros(8)).shape == (2,)

    def test_decision_is_probability_difference(self):
        """Test the decision value is p(legit) - p(fastflux)."""
        model = init_network([8, 3, 2], np.random.default_rng(3))
        x = np.linspace(0, 1, 8)
        p = mlp_forward(model, x)
        assert model.decide(x) == pytest.approx(p[1] - p[0])

    def test_output_layer_must_be_softmax(self):
        """Test a network without a 2-way softmax output is rejected."""
        with pytest.raises(ValueError):
            MlpModel([Layer(np.zeros((8, 2)), np.zeros(2), "sigmoid")])
        with pytest.raises(ValueError):
            MlpModel([Layer(np.zeros((8, 3)), np.zeros(3), "softmax")])

    def test_layer_dimensions(self):
        """Test mismatched layer shapes are rejected."""
        with pytest.raises(ValueError):
            MlpModel([Layer(np.zeros((8, 4)), np.zeros(4), "sigmoid"), Layer(np.zeros((5, 2)), np.zeros(2), "softmax")])

    def test_copy_is_independent(self):
        """Test copies do not share parameter arrays."""
        model = init_network([8, 4, 2], np.random.default_rng(4))
        clone = model.copy()
        clone.layers[0].W += 1.0
        assert not np.allclose(clone.layers[0].W, model.layers[0].W)


class TestMlpTrain:
    """Test mini-batch training."""

    def test_learns_blobs(self, blobs):
        """Test separated blobs are learned."""
        X, y = blobs
        model = mlp_train(X, y)
        assert np.mean(model.predict(X) == y) >= 0.99

    def test_loss_history_non_increasing(self, blobs):
        """Test accepted epochs never raise the training loss."""
        X, y = blobs
        history = mlp_train(X, y, TrainConfig(epochs=30, learning_rate=5.0)).loss_history
        assert len(history) >= 2
        assert all(b <= a for a, b in zip(history, history[1:]))

    def test_deterministic(self, blobs):
        """Test the same seed gives the same network."""
        X, y = blobs
        cfg = TrainConfig(epochs=5, seed=3)
        first, second = mlp_train(X, y, cfg), mlp_train(X, y, cfg)
        assert np.array_equal(first.decision_function(X), second.decision_function(X))

    def test_rejected_epoch_is_undone(self, blobs, monkeypatch):
        """Test an epoch that raises the loss is reverted and not recorded."""
        X, y = blobs
        losses = iter([1.0, 2.0, 0.5, 0.4])
        monkeypatch.setattr(mlp_module, "mlp_loss", lambda model, X, y: next(losses))
        model = mlp_train(X, y, TrainConfig(epochs=3))
        assert model.loss_history == [1.0, 0.5, 0.4]

    def test_diverged_loss(self, blobs, monkeypatch):
        """Test a loss that stays non-finite raises DivergedLoss."""
        X, y = blobs
        real_loss = mlp_module.mlp_loss
        calls = {"n": 0}

        def nan_after_start(model, X, y):
            calls["n"] += 1
            return real_loss(model, X, y) if calls["n"] == 1 else float("nan")

        monkeypatch.setattr(mlp_module, "mlp_loss", nan_after_start)
        with pytest.raises(DivergedLoss) as excinfo:
            mlp_train(X, y, TrainConfig(learning_rate=0.1, min_learning_rate=1e-3))
        assert excinfo.value.epoch == 7
        assert excinfo.value.exit_code == 3

    def test_hidden_sizes(self, blobs):
        """Test several hidden layers train end to end."""
        X, y = blobs
        model = mlp_train(X, y, TrainConfig(hidden_sizes=(6, 4), epochs=20))
        assert model.summary()["layer_sizes"] == [8, 6, 4, 2]

    def test_single_class(self):
        """Test one-label data raises SingleClassData."""
        with pytest.raises(SingleClassData):
            mlp_train(np.zeros((3, 8)), -np.ones(3))

    def test_payload_round_trip(self, blobs):
        """Test a network survives to_payload/from_payload."""
        X, y = blobs
        model = mlp_train(X, y, TrainConfig(epochs=3))
        restored = MlpModel.from_payload(model.to_payload())
        assert np.array_equal(restored.decision_function(X), model.decision_function(X))
