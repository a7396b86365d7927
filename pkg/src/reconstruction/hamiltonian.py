"""Hamiltonian reconstruction from (approximately) thermal observation data.

Candidates are the Pauli strings whose expectation values change fastest
along the latent manifold. Their couplings a_alpha are then fixed row by row
by matching the thermal observations of sum_alpha a_alpha O(alpha) at
lambda_0 = 1 to the data, and averaged after normalization.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence
import logging

import numpy as np
from sklearn.neighbors import NearestNeighbors
from tqdm import tqdm

from src.config.settings import RECONSTRUCTION_DEFAULTS
from src.errors import (
    ArgumentError,
    ConvergenceError,
    IllPosedError,
    NumericalError,
    PreconditionError,
    ReconstructionFailure,
)
from src.models.dataset import Dataset
from src.models.network import SweepResult
from src.models.operators import PauliLabel
from src.models.reconstruction import CandidateRanking, ReconstructionResult
from src.models.states import ObservationVector
from src.analysis.embedding import pca
from src.physics.gge import ThermalOracle

logger = logging.getLogger(__name__)

MODES = ("tangent", "pca1")


def _local_slopes(values: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Least-squares slope of every column of ``values`` against ``s``."""
    s = s - s.mean()
    denom = np.dot(s, s)
    if denom <= 1e-300:
        return np.zeros(values.shape[1])
    return s @ (values - values.mean(axis=0)) / denom


def rank_candidates(ds: Dataset, latents, mode: str = "tangent",
                    k: int = RECONSTRUCTION_DEFAULTS["k_neighbors"]) -> CandidateRanking:
    """Average |dO(alpha)/ds| over rows, by k-NN local linear regression.

    ``tangent`` uses the local principal direction of each neighborhood,
    ``pca1`` the global first principal direction of the latent set.
    """
    if mode not in MODES:
        raise ArgumentError(f"embedding mode must be one of {MODES}, got {mode!r}")
    latents = np.asarray(latents, dtype=float)
    if latents.ndim == 1:
        latents = latents[:, None]
    if len(latents) != ds.n_rows:
        raise ArgumentError(f"{len(latents)} latent rows for {ds.n_rows} dataset rows")
    if ds.n_rows < k + 1:
        raise ArgumentError(f"need at least k+1 = {k + 1} rows, got {ds.n_rows}")

    _, neighbors = NearestNeighbors(n_neighbors=k + 1, algorithm="kd_tree").fit(latents).kneighbors(latents)
    if mode == "pca1" and latents.shape[1] > 1 and np.ptp(latents, axis=0).max() > 0:
        coordinate = pca(latents, n_components=1).project(latents)[:, 0]
    elif mode == "pca1":
        coordinate = latents[:, 0]
    else:
        coordinate = None

    total = np.zeros(ds.dim)
    for row in range(ds.n_rows):
        local = neighbors[row]
        if coordinate is not None:
            s = coordinate[local]
        else:
            patch = latents[local] - latents[local].mean(axis=0)
            _, _, vt = np.linalg.svd(patch, full_matrices=False)
            s = patch @ vt[0]
        total += np.abs(_local_slopes(ds.values[local], s))
    magnitudes = total / ds.n_rows
    return CandidateRanking(
        magnitudes={label: float(m) for label, m in zip(ds.labels, magnitudes)},
        mode=mode,
        k_neighbors=k,
    )


def newton_solve(candidates: Sequence, target: ObservationVector, L_oracle: int,
                 tol: float = RECONSTRUCTION_DEFAULTS["tol"],
                 max_iter: int = RECONSTRUCTION_DEFAULTS["max_iter"],
                 fd_step: float = RECONSTRUCTION_DEFAULTS["fd_step"],
                 oracle: Optional[ThermalOracle] = None) -> ReconstructionResult:
    """Damped Newton solve of thermal_oracle(a)[alpha] = target[alpha] for the candidates."""
    labels = [PauliLabel(str(c)) for c in candidates]
    if not labels:
        raise ArgumentError("at least one candidate is required")
    if len(labels) > RECONSTRUCTION_DEFAULTS["max_candidates"]:
        raise ArgumentError(
            f"at most {RECONSTRUCTION_DEFAULTS['max_candidates']} candidates, got {len(labels)}"
        )
    if max(label.trimmed().support for label in labels) > target.support:
        raise ArgumentError(f"candidates exceed the target support {target.support}")
    rows = [target.index_of(label) for label in labels]
    goal = target.values[rows]
    oracle = oracle or ThermalOracle(labels, L_oracle, target.support)

    def mismatch(a: np.ndarray) -> np.ndarray:
        return oracle(a)[rows] - goal

    a = np.zeros(len(labels))
    r = mismatch(a)
    iterations = 0
    while np.linalg.norm(r) > tol:
        if iterations >= max_iter:
            raise ConvergenceError(
                f"Newton solve did not converge in {max_iter} iterations "
                f"(residual {np.linalg.norm(r):.2e})"
            )
        iterations += 1
        jac = np.empty((len(rows), len(labels)))
        for col in range(len(labels)):
            shift = np.zeros(len(labels))
            shift[col] = fd_step
            jac[:, col] = (mismatch(a + shift) - mismatch(a - shift)) / (2 * fd_step)
        condition = np.linalg.cond(jac)
        if not np.isfinite(condition) or condition > RECONSTRUCTION_DEFAULTS["condition_limit"]:
            raise IllPosedError(f"Newton Jacobian is singular (condition {condition:.2e})")
        step = np.linalg.solve(jac, -r)
        damping = 1.0
        trial = a + step
        r_trial = mismatch(trial)
        while np.linalg.norm(r_trial) >= np.linalg.norm(r) and damping > 2 ** -10:
            damping /= 2
            trial = a + damping * step
            r_trial = mismatch(trial)
        a, r = trial, r_trial
        logger.debug("Newton iteration %d residual %.3e", iterations, np.linalg.norm(r))

    scale = np.max(np.abs(a), initial=0.0)
    eliminated = [
        str(label.trimmed()) for label, value in zip(labels, a)
        if scale > 0 and abs(value) < RECONSTRUCTION_DEFAULTS["prune_ratio"] * scale
    ]
    return ReconstructionResult(
        coefficients={str(label.trimmed()): float(value) for label, value in zip(labels, a)},
        residual=float(np.linalg.norm(r)),
        iterations=iterations,
        eliminated=eliminated,
    )


def check_sweep_evidence(sweep: Optional[SweepResult],
                         limit: float = RECONSTRUCTION_DEFAULTS["sweep_ratio_limit"]) -> float:
    """loss(N_L=1) / loss(N_L=0) must show that one latent variable suffices."""
    if sweep is None:
        raise PreconditionError(
            "reconstruction needs a latent sweep showing one latent variable suffices "
            "(pass --sweep or --force)"
        )
    ratio = sweep.ratio(1, 0)
    if ratio is None:
        raise PreconditionError("latent sweep must contain N_L = 0 and N_L = 1")
    if ratio >= limit:
        raise PreconditionError(
            f"loss(N_L=1)/loss(N_L=0) = {ratio:.2e} is not below {limit:g}; "
            "data is not described by a single thermal parameter"
        )
    return ratio


def reconstruct(ds: Dataset, latents, L_oracle: int, mode: str = "tangent",
                top_m: int = RECONSTRUCTION_DEFAULTS["top_m"],
                candidates: Optional[Sequence[str]] = None,
                sweep: Optional[SweepResult] = None, force: bool = False,
                k: int = RECONSTRUCTION_DEFAULTS["k_neighbors"],
                tol: float = RECONSTRUCTION_DEFAULTS["tol"],
                max_iter: int = RECONSTRUCTION_DEFAULTS["max_iter"],
                max_rows: Optional[int] = None, jobs: int = 1,
                quiet: bool = True) -> ReconstructionResult:
    """Rank, select candidates, solve every row and average the normalized couplings."""
    sweep_ratio = None if force else check_sweep_evidence(sweep)
    ranking = None
    if candidates is None:
        ranking = rank_candidates(ds, latents, mode, k)
        candidates = [PauliLabel(s).trimmed().symbols for s in ranking.top(top_m)]
    candidates = [PauliLabel(str(c)).trimmed().symbols for c in candidates]
    oracle = ThermalOracle([PauliLabel(c) for c in candidates], L_oracle, ds.support)

    labels = [PauliLabel(s) for s in ds.labels]
    row_ids = list(range(ds.n_rows if max_rows is None else min(max_rows, ds.n_rows)))
    targets = [ObservationVector(ds.values[i], ds.support, labels) for i in row_ids]
    cand_rows = [targets[0].index_of(c) for c in candidates] if targets else []
    low_signal = [
        i for i, t in zip(row_ids, targets)
        if np.linalg.norm(t.values[cand_rows]) < RECONSTRUCTION_DEFAULTS["low_signal_threshold"]
    ]
    if low_signal:
        logger.warning("%d rows below the signal threshold are excluded", len(low_signal))
    excluded = set(low_signal)
    work = [(i, t) for i, t in zip(row_ids, targets) if i not in excluded]

    def solve(item):
        i, target = item
        try:
            return i, newton_solve(candidates, target, L_oracle, tol, max_iter, oracle=oracle), None
        except NumericalError as exc:
            return i, None, str(exc)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        outcomes = list(tqdm(pool.map(solve, work), total=len(work),
                             desc="Newton", disable=quiet))

    solved = [(i, res) for i, res, _ in outcomes if res is not None]
    failures = {i: msg for i, _, msg in outcomes if msg is not None}
    diagnostics: Dict[str, Any] = {
        "candidates": candidates,
        "ranking": ranking.to_dict() if ranking else None,
        "low_signal_rows": low_signal,
        "failed_rows": failures,
        "sweep_ratio": sweep_ratio,
        "forced": force,
    }
    fraction = len(solved) / len(work) if work else 0.0
    if fraction < RECONSTRUCTION_DEFAULTS["min_converged_fraction"]:
        raise ReconstructionFailure(
            f"only {len(solved)} of {len(work)} attempted rows converged", diagnostics
        )

    matrix = np.array([[res.coefficients[c] for c in candidates] for _, res in solved])
    reference = int(np.argmax(np.median(np.abs(matrix), axis=0)))
    usable = np.abs(matrix[:, reference]) > 1e-12
    if not np.any(usable):
        raise ReconstructionFailure("reference coupling vanishes in every row", diagnostics)
    normalized = matrix[usable] / matrix[usable, reference][:, None]
    mean, spread = normalized.mean(axis=0), normalized.std(axis=0)
    scale = np.max(np.abs(mean))
    eliminated = [c for c, m in zip(candidates, mean)
                  if abs(m) < RECONSTRUCTION_DEFAULTS["prune_ratio"] * scale]
    diagnostics["per_row"] = {i: res.coefficients for i, res in solved}
    logger.info("reconstructed %d couplings from %d rows", len(candidates), len(solved))
    return ReconstructionResult(
        coefficients={c: float(m) for c, m in zip(candidates, mean)},
        residual=float(max(res.residual for _, res in solved)),
        iterations=int(np.median([res.iterations for _, res in solved])),
        eliminated=eliminated,
        spread={c: float(s) for c, s in zip(candidates, spread)},
        reference=candidates[reference],
        n_rows=len(row_ids),
        n_converged=len(solved),
        n_low_signal=len(low_signal),
        diagnostics=diagnostics,
    )
