"""PCA and exact t-SNE of latent point sets."""

from typing import Optional
import logging

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.decomposition import PCA
from tqdm import tqdm

from src.config.settings import TSNE_DEFAULTS
from src.errors import ArgumentError, ResourceError
from src.models.analysis import Embedding2D, PcaResult

logger = logging.getLogger(__name__)

TSNE_MAX_POINTS = 5000


def pca(points, n_components: Optional[int] = None) -> PcaResult:
    """Mean-centred principal axes, sorted by explained variance."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if len(points) < 2:
        raise ArgumentError(f"PCA needs at least two points, got {len(points)}")
    model = PCA(n_components=n_components, svd_solver="full").fit(points)
    return PcaResult(
        components=model.components_,
        explained_variance=model.explained_variance_,
        explained_ratio=model.explained_variance_ratio_,
        mean=model.mean_,
    )


def _affinities(sq_dist: np.ndarray, perplexity: float, tol: float = 1e-5,
                max_steps: int = 50) -> np.ndarray:
    """Row-conditional Gaussian affinities whose entropy matches log(perplexity)."""
    n = len(sq_dist)
    target = np.log(perplexity)
    P = np.zeros((n, n))
    for i in range(n):
        d = np.delete(sq_dist[i], i)
        d = d - d.min()
        beta, beta_lo, beta_hi = 1.0, 0.0, np.inf
        for _ in range(max_steps):
            w = np.exp(-d * beta)
            total = w.sum()
            p = w / total
            entropy = np.log(total) + beta * np.dot(d, p)
            if abs(entropy - target) < tol:
                break
            if entropy > target:
                beta_lo = beta
                beta = beta * 2 if np.isinf(beta_hi) else (beta + beta_hi) / 2
            else:
                beta_hi = beta
                beta = (beta + beta_lo) / 2
        P[i, np.arange(n) != i] = p
    return P


def tsne(points, perplexity: float = TSNE_DEFAULTS["perplexity"],
         iterations: int = TSNE_DEFAULTS["iterations"], seed: int = 0,
         learning_rate: float = TSNE_DEFAULTS["learning_rate"],
         quiet: bool = True) -> Embedding2D:
    """Exact O(n^2) t-SNE with early exaggeration, momentum and adaptive gains."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = len(points)
    if n > TSNE_MAX_POINTS:
        raise ResourceError(f"exact t-SNE is limited to {TSNE_MAX_POINTS} points, got {n}")
    if n < 2:
        raise ArgumentError("t-SNE needs at least two points")
    if perplexity <= 0 or perplexity >= n / 3:
        raise ArgumentError(f"perplexity must lie in (0, n/3) = (0, {n / 3:.3g}), got {perplexity}")
    if iterations < 1:
        raise ArgumentError(f"iterations must be positive, got {iterations}")

    P = _affinities(squareform(pdist(points, "sqeuclidean")), perplexity)
    P = np.maximum((P + P.T) / (2 * n), 1e-12)

    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    exaggerated = TSNE_DEFAULTS["exaggeration_iterations"]
    kl_history = []

    for it in tqdm(range(iterations), desc="t-SNE", disable=quiet):
        exaggeration = TSNE_DEFAULTS["exaggeration"] if it < exaggerated else 1.0
        momentum = TSNE_DEFAULTS["initial_momentum"] if it < exaggerated else TSNE_DEFAULTS["final_momentum"]
        num = 1.0 / (1.0 + squareform(pdist(Y, "sqeuclidean")))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), 1e-12)
        W = (exaggeration * P - Q) * num
        grad = 4.0 * (np.diag(W.sum(axis=1)) - W) @ Y

        same_sign = (grad > 0) == (update > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        update = momentum * update - learning_rate * gains * grad
        Y = Y + update
        Y -= Y.mean(axis=0)

        off = ~np.eye(n, dtype=bool)
        kl_history.append(float(np.sum(P[off] * np.log(P[off] / Q[off]))))

    logger.debug("t-SNE of %d points, final KL %.4f", n, kl_history[-1])
    return Embedding2D(
        points=Y,
        config={"perplexity": perplexity, "iterations": iterations, "seed": seed,
                "learning_rate": learning_rate, "exaggeration": TSNE_DEFAULTS["exaggeration"],
                "exaggeration_iterations": exaggerated},
        kl_history=kl_history,
    )
