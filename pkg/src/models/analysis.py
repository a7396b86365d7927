"""Result records of the latent-space analyses."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np


@dataclass
class IdEstimate:
    """TwoNN intrinsic dimension with the retained neighbor ratios."""
    intrinsic_dim: float
    residual: float
    n_points: int
    mu: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "intrinsic_dim": self.intrinsic_dim,
            "residual": self.residual,
            "n_points": self.n_points,
            "n_retained": int(len(self.mu)),
        }


@dataclass
class SlopeEstimate:
    """Power-law exponent of the neighbor-ratio density inside one window."""
    window: Tuple[float, float]
    slope: float
    n_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {"mu_lo": self.window[0], "mu_hi": self.window[1],
                "slope": self.slope, "n_points": self.n_points}


@dataclass
class PcaResult:
    """Principal axes sorted by explained variance, descending."""
    components: np.ndarray
    explained_variance: np.ndarray
    explained_ratio: np.ndarray
    mean: np.ndarray

    def project(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.mean) @ self.components.T

    def reconstruct(self, projected: np.ndarray) -> np.ndarray:
        return projected @ self.components + self.mean


@dataclass
class Embedding2D:
    """Two-dimensional t-SNE coordinates with the run configuration."""
    points: np.ndarray
    config: Dict[str, Any]
    kl_history: List[float] = field(default_factory=list)

    @property
    def final_kl(self) -> Optional[float]:
        return self.kl_history[-1] if self.kl_history else None


@dataclass
class CorrelationResult:
    """Rank correlation of a latent coordinate with a physical observable."""
    spearman: float
    pvalue: float
    monotone: bool
    direction: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"spearman": self.spearman, "pvalue": self.pvalue,
                "monotone": self.monotone, "direction": self.direction}
