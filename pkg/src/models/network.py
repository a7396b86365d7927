"""Autoencoder configuration, parameters and training records."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import json

import numpy as np

from src.config.settings import NETWORK_DEFAULTS
from src.errors import ArgumentError

ACTIVATIONS = ("linear", "tanh")


@dataclass
class NetworkConfig:
    """Bottleneck network: input -> encoder -> latent -> decoder -> input."""
    input_dim: int
    latent_dim: int
    encoder_widths: Tuple[int, ...] = NETWORK_DEFAULTS["encoder_widths"]
    decoder_widths: Tuple[int, ...] = NETWORK_DEFAULTS["decoder_widths"]
    output_activation: str = NETWORK_DEFAULTS["output_activation"]

    def __post_init__(self):
        self.encoder_widths = tuple(int(w) for w in self.encoder_widths)
        self.decoder_widths = tuple(int(w) for w in self.decoder_widths)
        if self.input_dim < 1:
            raise ArgumentError(f"input dimension must be positive, got {self.input_dim}")
        if any(w < 1 for w in self.encoder_widths + self.decoder_widths):
            raise ArgumentError("hidden layer widths must be positive")
        if not 0 <= self.latent_dim <= self.input_dim:
            raise ArgumentError(
                f"latent dimension must be in [0, {self.input_dim}], got {self.latent_dim}"
            )
        if self.output_activation not in ACTIVATIONS:
            raise ArgumentError(f"output activation must be one of {ACTIVATIONS}")

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_dim, *self.encoder_widths, self.latent_dim,
                *self.decoder_widths, self.input_dim]

    @property
    def latent_layer(self) -> int:
        """Index of the layer whose activations are the latent variables."""
        return len(self.encoder_widths)

    @property
    def n_params(self) -> int:
        sizes = self.layer_sizes
        return sum(o * i + o for i, o in zip(sizes[:-1], sizes[1:]))

    def with_latent(self, latent_dim: int) -> "NetworkConfig":
        return NetworkConfig(self.input_dim, latent_dim, self.encoder_widths,
                             self.decoder_widths, self.output_activation)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "input_dim": self.input_dim,
            "latent_dim": self.latent_dim,
            "encoder_widths": list(self.encoder_widths),
            "decoder_widths": list(self.decoder_widths),
            "output_activation": self.output_activation,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkConfig":
        return cls(**data)


@dataclass
class NetworkParams:
    """Weights W (out x in) and biases b per layer."""
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def check(self, config: NetworkConfig):
        sizes = config.layer_sizes
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ArgumentError("parameter layer count does not match the configuration")
        for W, b, n_in, n_out in zip(self.weights, self.biases, sizes[:-1], sizes[1:]):
            if W.shape != (n_out, n_in) or b.shape != (n_out,):
                raise ArgumentError(f"layer shape {W.shape} does not match ({n_out}, {n_in})")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ArgumentError("network parameters must be finite")

    def copy(self) -> "NetworkParams":
        return NetworkParams([W.copy() for W in self.weights], [b.copy() for b in self.biases])

    def flat(self) -> np.ndarray:
        parts = []
        for W, b in zip(self.weights, self.biases):
            parts.extend([W.ravel(), b])
        return np.concatenate(parts) if parts else np.zeros(0)

    @classmethod
    def from_flat(cls, vector: np.ndarray, config: NetworkConfig) -> "NetworkParams":
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (config.n_params,):
            raise ArgumentError(f"expected {config.n_params} parameters, got {vector.shape}")
        weights, biases, pos = [], [], 0
        sizes = config.layer_sizes
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            weights.append(vector[pos:pos + n_out * n_in].reshape(n_out, n_in).copy())
            pos += n_out * n_in
            biases.append(vector[pos:pos + n_out].copy())
            pos += n_out
        return cls(weights, biases)


@dataclass
class AdamState:
    """First and second moments with the step counter."""
    m: List[np.ndarray]
    v: List[np.ndarray]
    t: int = 0
    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class TrainReport:
    """Loss curves and the early-stopping snapshot of one training run."""
    eval_steps: List[int]
    train_losses: List[float]
    test_losses: List[float]
    best_test_loss: float
    best_step: int
    best_params: NetworkParams
    steps: int
    batch_size: int
    seed: int
    config: NetworkConfig

    def summary(self) -> Dict[str, Any]:
        return {
            "latent_dim": self.config.latent_dim,
            "best_test_loss": self.best_test_loss,
            "best_step": self.best_step,
            "final_train_loss": self.train_losses[-1] if self.train_losses else None,
            "steps": self.steps,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "eval_steps": self.eval_steps,
            "train_losses": self.train_losses,
            "test_losses": self.test_losses,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


@dataclass
class SweepPoint:
    """Best test losses of every seed at one latent width."""
    latent_dim: int
    losses: List[float]
    seeds: List[int]

    @property
    def median(self) -> float:
        return float(np.median(self.losses))


@dataclass
class SweepResult:
    points: List[SweepPoint] = field(default_factory=list)

    def curve(self) -> List[Tuple[int, float]]:
        return [(p.latent_dim, p.median) for p in self.points]

    def loss(self, latent_dim: int) -> float:
        for p in self.points:
            if p.latent_dim == latent_dim:
                return p.median
        raise KeyError(latent_dim)

    def ratio(self, numerator: int, denominator: int) -> Optional[float]:
        try:
            den = self.loss(denominator)
            return self.loss(numerator) / den if den > 0 else None
        except KeyError:
            return None
