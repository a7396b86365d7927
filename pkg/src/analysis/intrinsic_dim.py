"""TwoNN intrinsic-dimension estimation and windowed slope diagnostics.

For each point the ratio mu = r2 / r1 of its second- and first-nearest
neighbor distances follows f(mu) = d mu^(-d-1) on a d-dimensional manifold,
so -ln(1 - P(mu)) = d ln(mu) for the cumulative distribution P.
"""

from typing import Optional, Sequence, Tuple
import logging

import numpy as np
from scipy import optimize
from sklearn.neighbors import NearestNeighbors

from src.config.settings import TWONN_DEFAULTS
from src.errors import ArgumentError, DegenerateDataError
from src.models.analysis import IdEstimate, SlopeEstimate

logger = logging.getLogger(__name__)


def neighbor_ratios(points) -> np.ndarray:
    """r2 / r1 for every point (Euclidean)."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if len(points) < 3:
        raise ArgumentError(f"need at least 3 points for neighbor ratios, got {len(points)}")
    distances, _ = NearestNeighbors(n_neighbors=3, algorithm="kd_tree").fit(points).kneighbors(points)
    r1, r2 = distances[:, 1], distances[:, 2]
    duplicates = np.flatnonzero(r1 <= 0.0)
    if len(duplicates):
        raise DegenerateDataError(duplicates)
    return r2 / r1


def twonn_id(points, discard_fraction: float = TWONN_DEFAULTS["discard_fraction"]) -> IdEstimate:
    """Least-squares fit of -ln(1 - P) against ln(mu) through the origin."""
    n = len(points)
    if n < 10:
        raise ArgumentError(f"TwoNN needs at least 10 points, got {n}")
    if not 0.0 <= discard_fraction < 1.0:
        raise ArgumentError(f"discard fraction must lie in [0, 1), got {discard_fraction}")
    mu = np.sort(neighbor_ratios(points))
    cdf = np.arange(1, n + 1) / n
    keep = min(int(np.floor(n * (1.0 - discard_fraction))), n - 1)
    x = np.log(mu[:keep])
    y = -np.log(1.0 - cdf[:keep])
    intrinsic_dim = float(np.dot(x, y) / np.dot(x, x))
    residual = float(np.sqrt(np.mean((y - intrinsic_dim * x) ** 2)))
    logger.debug("TwoNN on %d points: I_d=%.3f residual=%.3e", n, intrinsic_dim, residual)
    return IdEstimate(intrinsic_dim=intrinsic_dim, residual=residual, n_points=n, mu=mu[:keep])


def _window_exponent(mu: np.ndarray, lo: float, hi: float) -> float:
    """Maximum-likelihood exponent of d mu^(-d-1) truncated to [lo, hi)."""
    log_t = np.log(mu / lo)
    n = len(mu)
    if np.isinf(hi):
        return float(n / log_t.sum())
    log_r = np.log(hi / lo)

    def score(d: float) -> float:
        tail = np.exp(-d * log_r)
        return n / d - log_t.sum() - n * tail * log_r / (1.0 - tail)

    lo_d, hi_d = 1e-6, 100.0
    if score(lo_d) * score(hi_d) > 0:
        raise ArgumentError(f"window [{lo}, {hi}) does not support a positive power-law slope")
    return float(optimize.brentq(score, lo_d, hi_d, xtol=1e-12))


def two_slope_analysis(points=None, windows: Optional[Sequence[Tuple[float, float]]] = None,
                       min_points: int = TWONN_DEFAULTS["min_window_points"],
                       mu: Optional[np.ndarray] = None):
    """Power-law slope of the neighbor-ratio density inside each mu window."""
    if mu is None:
        if points is None:
            raise ArgumentError("either points or neighbor ratios are required")
        mu = neighbor_ratios(points)
    mu = np.asarray(mu, dtype=float)
    windows = TWONN_DEFAULTS["windows"] if windows is None else windows
    slopes = []
    for lo, hi in windows:
        lo, hi = float(lo), float(hi)
        if not 1.0 <= lo < hi:
            raise ArgumentError(f"invalid mu window [{lo}, {hi})")
        inside = mu[(mu >= lo) & (mu < hi)]
        if len(inside) < min_points:
            raise ArgumentError(
                f"mu window [{lo}, {hi}) holds {len(inside)} points, need {min_points}"
            )
        slopes.append(SlopeEstimate(window=(lo, hi), slope=_window_exponent(inside, lo, hi),
                                    n_points=len(inside)))
    return slopes
