"""Bottleneck autoencoder with explicit backpropagation and Adam.

Hidden layers (including the latent layer) use tanh; the output layer is
linear unless configured otherwise. The loss is the mean over rows and
vector components of the squared reconstruction error.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import json
import logging

import numpy as np
from tqdm import tqdm

from src.config.settings import ADAM_DEFAULTS, NETWORK_DEFAULTS
from src.errors import ArgumentError, ParseError, TrainingError
from src.models.dataset import Dataset
from src.models.network import (
    AdamState,
    NetworkConfig,
    NetworkParams,
    SweepPoint,
    SweepResult,
    TrainReport,
)
from src.utils.files import atomic_write

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = "autoencoder-v1"


def init_params(config: NetworkConfig, rng: np.random.Generator) -> NetworkParams:
    """Weights uniform in +-1/sqrt(fan_in), zero biases."""
    sizes = config.layer_sizes
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(max(n_in, 1))
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(np.zeros(n_out))
    return NetworkParams(weights, biases)


def _as_batch(x, config: NetworkConfig) -> np.ndarray:
    x = np.asarray(getattr(x, "values", x), dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != config.input_dim:
        raise ArgumentError(f"input of shape {x.shape} does not match input_dim={config.input_dim}")
    return x


def _activations(params: NetworkParams, config: NetworkConfig, x: np.ndarray) -> List[np.ndarray]:
    acts = [x]
    last = len(params.weights) - 1
    for layer, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = acts[-1] @ W.T + b
        if layer < last or config.output_activation == "tanh":
            z = np.tanh(z)
        acts.append(z)
    return acts


def forward(params: NetworkParams, config: NetworkConfig, x) -> Tuple[np.ndarray, np.ndarray]:
    """(reconstruction, latent) for a single vector or a batch of rows."""
    single = np.ndim(getattr(x, "values", x)) == 1
    acts = _activations(params, config, _as_batch(x, config))
    output, latent = acts[-1], acts[config.latent_layer + 1]
    return (output[0], latent[0]) if single else (output, latent)


def loss(params: NetworkParams, config: NetworkConfig, batch) -> float:
    batch = _as_batch(batch, config)
    if len(batch) == 0:
        raise ArgumentError("loss of an empty batch is undefined")
    output = _activations(params, config, batch)[-1]
    return float(np.mean((output - batch) ** 2))


def gradient(params: NetworkParams, config: NetworkConfig, batch) -> NetworkParams:
    """Exact gradient of :func:`loss` by reverse accumulation."""
    batch = _as_batch(batch, config)
    acts = _activations(params, config, batch)
    delta = 2.0 * (acts[-1] - batch) / batch.size
    last = len(params.weights) - 1
    grad_w: List[np.ndarray] = [None] * len(params.weights)
    grad_b: List[np.ndarray] = [None] * len(params.weights)
    for layer in range(last, -1, -1):
        if layer < last or config.output_activation == "tanh":
            delta = delta * (1.0 - acts[layer + 1] ** 2)
        grad_w[layer] = delta.T @ acts[layer]
        grad_b[layer] = delta.sum(axis=0)
        delta = delta @ params.weights[layer]
    return NetworkParams(grad_w, grad_b)


def adam_init(params: NetworkParams, **hyper) -> AdamState:
    settings = {**ADAM_DEFAULTS, **hyper}
    zeros = [np.zeros_like(p) for p in params.weights + params.biases]
    return AdamState(m=zeros, v=[z.copy() for z in zeros], **settings)


def adam_update(params: NetworkParams, grads: NetworkParams, state: AdamState):
    """In-place Adam step on ``params``."""
    state.t += 1
    correction1 = 1.0 - state.beta1 ** state.t
    correction2 = 1.0 - state.beta2 ** state.t
    tensors = params.weights + params.biases
    for p, g, m, v in zip(tensors, grads.weights + grads.biases, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)


def mean_baseline_loss(ds: Dataset) -> float:
    """Test loss of the best constant predictor, the training-set mean."""
    train, test = ds.train, ds.test
    return float(np.mean((test - train.mean(axis=0)) ** 2))


def train(ds: Dataset, config: NetworkConfig, batch_size: int, steps: int,
          eval_every: int = NETWORK_DEFAULTS["eval_every"], seed: int = 0,
          lr: float = ADAM_DEFAULTS["lr"], quiet: bool = True) -> TrainReport:
    """Shuffled mini-batch Adam with early stopping on the test loss."""
    if steps < 1:
        raise ArgumentError(f"steps must be positive, got {steps}")
    if batch_size < 1 or eval_every < 1:
        raise ArgumentError("batch size and evaluation interval must be positive")
    train_x, test_x = ds.train, ds.test
    if train_x.shape[1] != config.input_dim:
        raise ArgumentError(
            f"dataset has {train_x.shape[1]} columns, network expects {config.input_dim}"
        )
    rng = np.random.default_rng(seed)
    params = init_params(config, rng)
    adam = adam_init(params, lr=lr)
    batch_size = min(batch_size, len(train_x))

    eval_steps, train_losses, test_losses = [], [], []
    best_loss, best_step, best_params = np.inf, 0, params.copy()
    order, cursor = rng.permutation(len(train_x)), 0

    for step in tqdm(range(1, steps + 1), desc=f"train N_L={config.latent_dim}", disable=quiet):
        if cursor + batch_size > len(order):
            order, cursor = rng.permutation(len(train_x)), 0
        batch = train_x[order[cursor:cursor + batch_size]]
        cursor += batch_size
        adam_update(params, gradient(params, config, batch), adam)

        if step % eval_every == 0 or step == steps:
            train_loss = loss(params, config, train_x)
            test_loss = loss(params, config, test_x)
            if not (np.isfinite(train_loss) and np.isfinite(test_loss)):
                raise TrainingError(step, train_loss if not np.isfinite(train_loss) else test_loss)
            eval_steps.append(step)
            train_losses.append(train_loss)
            test_losses.append(test_loss)
            if test_loss < best_loss:
                best_loss, best_step, best_params = test_loss, step, params.copy()
            logger.debug("step %d train %.3e test %.3e", step, train_loss, test_loss)

    logger.info("N_L=%d best test loss %.3e at step %d", config.latent_dim, best_loss, best_step)
    return TrainReport(
        eval_steps=eval_steps,
        train_losses=train_losses,
        test_losses=test_losses,
        best_test_loss=float(best_loss),
        best_step=best_step,
        best_params=best_params,
        steps=steps,
        batch_size=batch_size,
        seed=seed,
        config=config,
    )


def latent_sweep(ds: Dataset, latent_dims: Sequence[int], config: NetworkConfig,
                 batch_size: int, steps: int, seeds: Sequence[int] = (0,),
                 eval_every: int = NETWORK_DEFAULTS["eval_every"], lr: float = ADAM_DEFAULTS["lr"],
                 jobs: int = 1, quiet: bool = True) -> Tuple[SweepResult, Dict[Tuple[int, int], TrainReport]]:
    """One independent training per (latent width, seed); median over seeds per width."""
    latent_dims = list(latent_dims)
    seeds = list(seeds)
    if not latent_dims:
        raise ArgumentError("latent sweep needs at least one latent width")
    if not seeds:
        raise ArgumentError("latent sweep needs at least one seed")
    jobs_list = [(n_l, s) for n_l in latent_dims for s in seeds]

    def run(job):
        n_l, s = job
        return train(ds, config.with_latent(n_l), batch_size, steps, eval_every, s, lr)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        reports = list(tqdm(pool.map(run, jobs_list), total=len(jobs_list),
                            desc="latent sweep", disable=quiet))
    by_job = dict(zip(jobs_list, reports))
    result = SweepResult([
        SweepPoint(n_l, [by_job[(n_l, s)].best_test_loss for s in seeds], seeds)
        for n_l in latent_dims
    ])
    return result, by_job


def encode_dataset(params: NetworkParams, config: NetworkConfig, ds) -> np.ndarray:
    """Latent vector per row, in row order."""
    _, latent = forward(params, config, _as_batch(ds, config))
    return latent


def save_checkpoint(path: Union[str, Path], params: NetworkParams, config: NetworkConfig,
                    report: Optional[TrainReport] = None, extra: Optional[Dict[str, Any]] = None):
    """``.npz`` with version tag, config JSON, flat parameters and the run summary."""
    params.check(config)
    summary = report.summary() if report is not None else {}
    summary.update(extra or {})

    def writer(tmp: Path):
        with open(tmp, "wb") as handle:
            np.savez(
                handle,
                version=np.array(CHECKPOINT_VERSION),
                config=np.array(json.dumps(config.to_dict())),
                params=params.flat(),
                report=np.array(json.dumps(summary)),
            )

    atomic_write(path, writer)


def load_checkpoint(path: Union[str, Path]) -> Tuple[NetworkParams, NetworkConfig, Dict[str, Any]]:
    try:
        with np.load(path, allow_pickle=False) as data:
            version = str(data["version"])
            if version != CHECKPOINT_VERSION:
                raise ParseError(str(path), f"unsupported checkpoint version {version!r}")
            config = NetworkConfig.from_dict(json.loads(str(data["config"])))
            params = NetworkParams.from_flat(data["params"], config)
            summary = json.loads(str(data["report"]))
    except (OSError, KeyError, ValueError) as exc:
        raise ParseError(str(path), f"cannot read checkpoint: {exc}") from exc
    return params, config, summary
