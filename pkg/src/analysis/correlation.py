"""Latent coordinates against physical observables."""

from typing import Optional
import logging
import warnings

import numpy as np
from scipy.stats import spearmanr

from src.errors import ArgumentError, DegenerateWarning
from src.models.analysis import CorrelationResult
from src.analysis.embedding import pca

logger = logging.getLogger(__name__)


def _tied_fraction(values: np.ndarray) -> float:
    _, counts = np.unique(values, return_counts=True)
    return float(counts[counts > 1].sum()) / len(values)


def latent_observable_correlation(latents, values, direction: Optional[int] = None) -> CorrelationResult:
    """Spearman correlation of a latent coordinate with a per-row observable.

    One-dimensional latents are used directly; otherwise the latents are
    projected on PCA direction ``direction`` (default 0).
    """
    latents = np.asarray(latents, dtype=float)
    values = np.asarray(values, dtype=float)
    if latents.ndim == 2 and latents.shape[1] == 1:
        latents = latents[:, 0]
    if latents.ndim == 2:
        direction = 0 if direction is None else direction
        if not 0 <= direction < latents.shape[1]:
            raise ArgumentError(f"PCA direction {direction} out of range for {latents.shape[1]} latents")
        coordinate = pca(latents).project(latents)[:, direction]
    else:
        coordinate = latents
    if len(coordinate) != len(values):
        raise ArgumentError(f"{len(coordinate)} latent rows but {len(values)} observable values")
    if len(values) < 3:
        raise ArgumentError("rank correlation needs at least 3 rows")

    for name, column in (("latent", coordinate), ("observable", values)):
        if _tied_fraction(column) > 0.5:
            warnings.warn(f"more than half of the {name} values are tied", DegenerateWarning)

    rho, pvalue = spearmanr(coordinate, values)
    if not np.isfinite(rho):
        warnings.warn("rank correlation undefined for constant input", DegenerateWarning)
        rho, pvalue = 0.0, 1.0

    steps = np.diff(coordinate[np.argsort(values, kind="stable")])
    monotone = bool(np.all(steps > 0) or np.all(steps < 0))
    return CorrelationResult(spearman=float(rho), pvalue=float(pvalue), monotone=monotone,
                             direction=direction)
