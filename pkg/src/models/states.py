"""Quantum states, observation vectors and dissipator records."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from src.errors import ArgumentError
from src.models.operators import PauliLabel


@dataclass
class LagrangeVector:
    """Lagrange multipliers lambda_i, one per charge."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ArgumentError("Lagrange multipliers must be finite")

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class GGEState:
    """Normalized (generalized) Gibbs density matrix exp(sum_i lambda_i C_i) / Z."""
    rho: np.ndarray
    lagrange: LagrangeVector
    charge_ids: List[str]
    L: int


@dataclass
class ObservationVector:
    """Expectation values of every canonical Pauli string of a fixed support."""
    values: np.ndarray
    support: int
    labels: List[PauliLabel]
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = 3 * 4 ** (self.support - 1)
        if self.values.shape != (expected,):
            raise ArgumentError(
                f"observation vector of support {self.support} needs {expected} values, "
                f"got shape {self.values.shape}"
            )

    def __getitem__(self, label) -> float:
        key = str(label)
        if len(key) < self.support:
            key = key + "0" * (self.support - len(key))
        for i, lab in enumerate(self.labels):
            if lab.symbols == key:
                return float(self.values[i])
        raise KeyError(label)

    def index_of(self, label) -> int:
        key = PauliLabel(str(label)).padded(self.support).symbols
        for i, lab in enumerate(self.labels):
            if lab.symbols == key:
                return i
        raise KeyError(label)


@dataclass
class LindbladTerm:
    """Jump operator repeated on every site j, acting on sites j+offset ..."""
    matrix: np.ndarray
    rate: float = 1.0
    offset: int = 0
    name: str = ""

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape not in ((2, 2), (4, 4)):
            raise ArgumentError(f"Lindblad operator must be 2x2 or 4x4, got {self.matrix.shape}")
        if not np.isfinite(self.rate) or self.rate < 0:
            raise ArgumentError(f"Lindblad rate must be finite and non-negative, got {self.rate}")

    @property
    def n_sites(self) -> int:
        return 1 if self.matrix.shape == (2, 2) else 2


@dataclass
class LindbladSpec:
    """Translationally repeated dissipators with a global Markovian strength epsilon."""
    operators: List[LindbladTerm]
    epsilon: float = 1.0
    kind: str = ""
    parameters: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ArgumentError(f"epsilon must be finite and non-negative, got {self.epsilon}")


@dataclass
class Liouvillian:
    """Row-stacked superoperator of dimension 4^N acting on vec(rho)."""
    superoperator: sp.csr_matrix
    N: int

    @property
    def dim(self) -> int:
        return self.superoperator.shape[0]


@dataclass
class SteadyState:
    """Null vector of a Liouvillian reshaped to a density matrix."""
    rho: np.ndarray
    residual: float
    N: int
    method: str = ""


@dataclass(frozen=True)
class GateParams:
    """Random couplings of the U(1)-symmetric two-site gate."""
    theta1: float
    theta2: float
    c: float
    dt: float = 0.1

    @property
    def a(self) -> float:
        return (self.theta2 - self.theta1) / 2

    @property
    def b(self) -> float:
        return (self.theta1 + self.theta2) / 2

    def to_dict(self) -> Dict[str, float]:
        return {"theta1": self.theta1, "theta2": self.theta2, "c": self.c, "dt": self.dt}


@dataclass
class StateVector:
    """Pure state of L spin-1/2 sites; site 0 is the most significant bit."""
    amplitudes: np.ndarray
    L: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.L,):
            raise ArgumentError(
                f"state of L={self.L} needs {2 ** self.L} amplitudes, got {self.amplitudes.shape}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.L)


@dataclass
class TrajectoryRecord:
    """Observations recorded along one random-circuit trajectory."""
    observations: List[ObservationVector]
    steps: List[int]
    times: List[float]
    seed: int
    bloch: Tuple[float, float]
    L: int
    gates: List[Tuple[GateParams, GateParams]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.observations) != len(self.steps):
            raise ArgumentError("one observation per recorded step is required")
