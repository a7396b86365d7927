"""
Tests for the bottleneck autoencoder: forward pass, gradients, training and checkpoints.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.data.store import split
from src.errors import ArgumentError, ParseError, TrainingError
from src.learning.autoencoder import (
    adam_init,
    adam_update,
    encode_dataset,
    forward,
    gradient,
    init_params,
    latent_sweep,
    load_checkpoint,
    loss,
    mean_baseline_loss,
    save_checkpoint,
    train,
)
from src.models.dataset import Dataset
from src.models.network import NetworkConfig, NetworkParams, SweepPoint, SweepResult
from src.physics.pauli import enumerate_support_strings


def curve_dataset(n_rows: int = 200, seed: int = 0) -> Dataset:
    """Rows on a one-dimensional curve in three dimensions."""
    t = np.random.default_rng(seed).uniform(-1, 1, n_rows)
    values = np.stack([t, t ** 2, np.sin(2 * t)], axis=1)
    ds = Dataset(values=values, support=1, labels=[str(s) for s in enumerate_support_strings(1)],
                 annotations={"t": t.tolist()})
    return split(ds, 0.8, seed=seed)


def finite_difference(params, config, batch, h=1e-6):
    flat = params.flat()
    out = np.zeros_like(flat)
    for i in range(len(flat)):
        up, down = flat.copy(), flat.copy()
        up[i] += h
        down[i] -= h
        out[i] = (loss(NetworkParams.from_flat(up, config), config, batch)
                  - loss(NetworkParams.from_flat(down, config), config, batch)) / (2 * h)
    return out


class TestNetworkConfig:
    """Tests for layer bookkeeping."""

    def test_layer_sizes(self):
        """Encoder, latent and decoder widths line up between input and output."""
        config = NetworkConfig(48, 2, (8, 8), (8,))
        assert config.layer_sizes == [48, 8, 8, 2, 8, 48]
        assert config.latent_layer == 2
        assert config.n_params == sum(o * i + o for i, o in [(48, 8), (8, 8), (8, 2), (2, 8), (8, 48)])

    def test_invalid_configs(self):
        """Negative latent widths and unknown activations are rejected."""
        with pytest.raises(ArgumentError):
            NetworkConfig(4, -1)
        with pytest.raises(ArgumentError):
            NetworkConfig(4, 1, output_activation="relu")

    def test_flat_round_trip(self):
        """Flattening and rebuilding preserves every parameter."""
        config = NetworkConfig(5, 2, (4,), (3,))
        params = init_params(config, np.random.default_rng(0))
        back = NetworkParams.from_flat(params.flat(), config)
        for a, b in zip(params.weights + params.biases, back.weights + back.biases):
            np.testing.assert_array_equal(a, b)


class TestForwardAndGradient:
    """Tests for the forward pass and backpropagation."""

    def test_zero_parameters_give_zero_output(self):
        """All-zero weights and biases map every input to zero."""
        config = NetworkConfig(6, 2, (8,), (8,))
        sizes = config.layer_sizes
        params = NetworkParams([np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:])],
                               [np.zeros(o) for o in sizes[1:]])
        output, latent = forward(params, config, np.ones(6))
        np.testing.assert_array_equal(output, np.zeros(6))
        np.testing.assert_array_equal(latent, np.zeros(2))

    def test_constant_predictor_loss_is_variance(self):
        """A network outputting the batch mean has loss equal to the mean variance."""
        config = NetworkConfig(4, 1, (3,), (3,))
        batch = np.random.default_rng(1).normal(size=(20, 4))
        params = init_params(config, np.random.default_rng(0))
        params.weights[-1][:] = 0.0
        params.biases[-1][:] = batch.mean(axis=0)
        assert loss(params, config, batch) == pytest.approx(batch.var(axis=0).mean(), rel=1e-12)

    @pytest.mark.parametrize("activation", ["linear", "tanh"])
    def test_gradient_matches_finite_differences(self, activation):
        """Backpropagation agrees with central differences."""
        config = NetworkConfig(6, 2, (8,), (8,), output_activation=activation)
        rng = np.random.default_rng(2)
        params = init_params(config, rng)
        for b in params.biases:
            b[:] = rng.uniform(-0.3, 0.3, size=b.shape)
        batch = rng.uniform(-1, 1, size=(5, 6))
        analytic = gradient(params, config, batch).flat()
        numeric = finite_difference(params, config, batch)
        assert np.linalg.norm(analytic - numeric) / np.linalg.norm(analytic) < 1e-6

    def test_zero_input_gives_zero_first_layer_weight_gradient(self):
        """With a zero batch the first weight matrix gets no gradient."""
        config = NetworkConfig(6, 2, (8,), (8,))
        params = init_params(config, np.random.default_rng(3))
        grads = gradient(params, config, np.zeros((4, 6)))
        np.testing.assert_array_equal(grads.weights[0], 0.0)

    def test_duplicated_batch_has_same_gradient(self):
        """The loss is a mean, so repeating the batch does not change the gradient."""
        config = NetworkConfig(6, 2, (8,), (8,))
        params = init_params(config, np.random.default_rng(4))
        batch = np.random.default_rng(5).uniform(-1, 1, size=(3, 6))
        single = gradient(params, config, batch).flat()
        double = gradient(params, config, np.concatenate([batch, batch])).flat()
        np.testing.assert_allclose(single, double, rtol=1e-12, atol=1e-15)

    def test_input_width_mismatch(self):
        """Inputs must have input_dim columns."""
        config = NetworkConfig(6, 2, (8,), (8,))
        params = init_params(config, np.random.default_rng(0))
        with pytest.raises(ArgumentError):
            forward(params, config, np.zeros(5))

    def test_adam_reduces_loss(self):
        """Full-batch Adam steps lower the loss on a fixed batch."""
        config = NetworkConfig(4, 2, (8,), (8,))
        rng = np.random.default_rng(6)
        params = init_params(config, rng)
        batch = rng.uniform(-1, 1, size=(16, 4))
        state = adam_init(params, lr=1e-2)
        before = loss(params, config, batch)
        for _ in range(200):
            adam_update(params, gradient(params, config, batch), state)
        assert loss(params, config, batch) < 0.5 * before


class TestTraining:
    """Tests for mini-batch training and latent sweeps."""

    def test_training_is_reproducible(self):
        """Equal seeds give identical best losses and parameters."""
        ds = curve_dataset()
        config = NetworkConfig(3, 1, (8,), (8,))
        a = train(ds, config, 16, 100, eval_every=25, seed=3)
        b = train(ds, config, 16, 100, eval_every=25, seed=3)
        assert a.best_test_loss == b.best_test_loss
        np.testing.assert_array_equal(a.best_params.flat(), b.best_params.flat())
        assert a.eval_steps == [25, 50, 75, 100]

    def test_longer_training_never_worse(self):
        """Doubling the step budget cannot raise the early-stopped loss."""
        ds = curve_dataset()
        config = NetworkConfig(3, 1, (8,), (8,))
        short = train(ds, config, 16, 400, eval_every=100, seed=1, lr=5e-3)
        long = train(ds, config, 16, 800, eval_every=100, seed=1, lr=5e-3)
        assert long.best_test_loss <= short.best_test_loss
        assert long.test_losses[:4] == short.test_losses

    def test_zero_latent_width_matches_mean_baseline(self):
        """Without latent variables the network learns the training mean."""
        ds = curve_dataset()
        report = train(ds, NetworkConfig(3, 0, (8,), (8,)), 32, 2000, eval_every=50, seed=0, lr=5e-3)
        baseline = mean_baseline_loss(ds)
        assert 0.85 * baseline <= report.best_test_loss <= 1.15 * baseline

    def test_one_latent_variable_explains_a_curve(self):
        """A single latent unit beats the constant predictor on curve data."""
        ds = curve_dataset()
        config = NetworkConfig(3, 1, (16,), (16,))
        report = train(ds, config, 16, 3000, eval_every=100, seed=0, lr=1e-2)
        assert report.best_test_loss < 0.2 * mean_baseline_loss(ds)

    def test_non_finite_loss_raises(self):
        """A NaN in the data surfaces as TrainingError at the first evaluation."""
        ds = curve_dataset(40)
        ds.values[:, 0] = np.nan
        with pytest.raises(TrainingError) as info:
            train(ds, NetworkConfig(3, 1, (4,), (4,)), 8, 20, eval_every=5)
        assert info.value.step == 5

    def test_unsplit_dataset_rejected(self):
        """Training needs a train/test split."""
        ds = curve_dataset()
        ds.split = None
        with pytest.raises(ArgumentError):
            train(ds, NetworkConfig(3, 1, (4,), (4,)), 8, 10)

    def test_latent_sweep(self):
        """A sweep reports one median per latent width over all seeds."""
        ds = curve_dataset(60)
        config = NetworkConfig(3, 0, (4,), (4,))
        result, reports = latent_sweep(ds, [0, 1], config, 8, 30, seeds=[0, 1], eval_every=10, jobs=2)
        assert [p.latent_dim for p in result.points] == [0, 1]
        assert len(reports) == 4
        point = result.points[1]
        assert point.median == pytest.approx(np.median([reports[(1, 0)].best_test_loss,
                                                        reports[(1, 1)].best_test_loss]))

    def test_sweep_ratio(self):
        """Loss ratios use medians and are undefined for missing widths."""
        result = SweepResult([SweepPoint(0, [1.0, 3.0], [0, 1]), SweepPoint(1, [0.01, 0.03], [0, 1])])
        assert result.ratio(1, 0) == pytest.approx(0.01)
        assert result.ratio(2, 0) is None

    def test_encode_dataset_shape(self):
        """Every row gets a latent vector."""
        ds = curve_dataset(30)
        config = NetworkConfig(3, 2, (4,), (4,))
        params = init_params(config, np.random.default_rng(0))
        assert encode_dataset(params, config, ds).shape == (30, 2)


class TestCheckpoints:
    """Tests for saving and loading trained networks."""

    def test_round_trip(self, tmp_path):
        """Parameters, configuration and summary survive a checkpoint."""
        ds = curve_dataset(40)
        config = NetworkConfig(3, 1, (4,), (4,))
        report = train(ds, config, 8, 20, eval_every=10)
        path = tmp_path / "model.npz"
        save_checkpoint(path, report.best_params, config, report, extra={"dataset": "curve"})
        params, back_config, summary = load_checkpoint(path)
        assert back_config == config
        np.testing.assert_array_equal(params.flat(), report.best_params.flat())
        assert summary["best_test_loss"] == report.best_test_loss
        assert summary["dataset"] == "curve"

    def test_garbage_file(self, tmp_path):
        """A file that is not a checkpoint is a parse error."""
        path = tmp_path / "model.npz"
        path.write_bytes(b"not a checkpoint")
        with pytest.raises(ParseError):
            load_checkpoint(path)
