"""Records produced by Hamiltonian reconstruction."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np


@dataclass
class CandidateRanking:
    """Average |dO(alpha)/ds| along the latent manifold, per canonical label."""
    magnitudes: Dict[str, float]
    mode: str
    k_neighbors: int

    def ordered(self) -> List[str]:
        return sorted(self.magnitudes, key=lambda label: (-self.magnitudes[label], label))

    def top(self, m: int) -> List[str]:
        return self.ordered()[:m]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "k_neighbors": self.k_neighbors,
            "ranking": [[label, self.magnitudes[label]] for label in self.ordered()],
        }


@dataclass
class ReconstructionResult:
    """Coefficients a_alpha at lambda_0 = 1; only ratios between them are physical."""
    coefficients: Dict[str, float]
    residual: float
    iterations: int
    eliminated: List[str] = field(default_factory=list)
    spread: Dict[str, float] = field(default_factory=dict)
    reference: Optional[str] = None
    n_rows: int = 1
    n_converged: int = 1
    n_low_signal: int = 0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def ratio(self, numerator: str, denominator: str) -> float:
        return self.coefficients[numerator] / self.coefficients[denominator]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coefficients": self.coefficients,
            "spread": self.spread,
            "reference": self.reference,
            "eliminated": self.eliminated,
            "residual": self.residual,
            "iterations": self.iterations,
            "n_rows": self.n_rows,
            "n_converged": self.n_converged,
            "n_low_signal": self.n_low_signal,
            "diagnostics": self.diagnostics,
        }
