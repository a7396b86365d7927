"""Dataset generation for the three physical sources.

Every sample gets its own random stream spawned from one SeedSequence, and
results are collected in submission order, so the output does not depend on
the number of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence
import logging

import numpy as np
from tqdm import tqdm

from src.config.settings import CIRCUIT_DEFAULTS, LAGRANGE_RANGE, LINDBLAD_DEFAULTS, MODEL_PRESETS
from src.errors import ArgumentError
from src.models.dataset import Dataset, SourceKind
from src.models.operators import PauliLabel
from src.physics.circuit import default_record_steps, run_trajectory, sample_bloch
from src.physics.gge import ChargeSet, observe, sample_lagrange
from src.physics.lindblad import (
    build_liouvillian,
    random_rotated_dissipators,
    structured_dissipators,
    steady_state,
)
from src.physics.pauli import build_dense, ising_charge, ising_charges, ising_hamiltonian, pauli_string_matrix

logger = logging.getLogger(__name__)


def _parallel_map(fn: Callable, items: Sequence, jobs: int, desc: str, quiet: bool) -> List:
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        return list(tqdm(pool.map(fn, items), total=len(items), desc=desc, disable=quiet))


def _child_seeds(seed: int, n: int) -> List[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]


def _model(model: str) -> Dict[str, float]:
    if model not in MODEL_PRESETS:
        raise ArgumentError(f"unknown model {model!r}; choose from {sorted(MODEL_PRESETS)}")
    return MODEL_PRESETS[model]


def sample_gge_dataset(n_charges: int, n: int, L: int, support: int = 3, seed: int = 0,
                       J: float = 1.0, h_x: float = 0.6, jobs: int = 1,
                       quiet: bool = True) -> Dataset:
    """n GGEs of the transverse-field Ising chain with uniformly drawn multipliers."""
    if not 1 <= n_charges <= 4:
        raise ArgumentError(f"number of charges must be in [1, 4], got {n_charges}")
    if n < 10:
        raise ArgumentError(f"a dataset needs at least 10 rows, got {n}")
    charges = ising_charges(n_charges, J, h_x)
    charge_set = ChargeSet(charges, L)
    lagrange = sample_lagrange(n, n_charges, np.random.default_rng(seed), J)

    def one(lam: np.ndarray):
        state = charge_set.state(lam)
        return observe(state, support), charge_set.expectations(state.rho) / L

    results = _parallel_map(one, list(lagrange), jobs, "GGE", quiet)
    densities = np.array([r[1] for r in results])
    annotations: Dict[str, List[Any]] = {"lagrange": lagrange.tolist()}
    for i, charge_id in enumerate(charge_set.charge_ids):
        annotations[f"{charge_id}_density"] = densities[:, i].tolist()
    annotations["energy_density"] = densities[:, 0].tolist()
    logger.info("generated %d GGE rows (N_C=%d, L=%d, support=%d)", n, n_charges, L, support)
    return Dataset.from_observations(
        [r[0] for r in results],
        source=SourceKind.GGE,
        metadata={
            "n_charges": n_charges, "L": L, "support": support, "seed": seed,
            "J": J, "h_x": h_x, "h_z": 0.0,
            "lagrange_range": [-LAGRANGE_RANGE / abs(J), LAGRANGE_RANGE / abs(J)],
            "lagrange_sampling": "uniform per component",
        },
        annotations=annotations,
    )


def sample_lindblad_dataset(kind: str, n: int, N: int, model: str = "chaotic",
                            epsilon: float = LINDBLAD_DEFAULTS["epsilon"], support: int = 3,
                            seed: int = 0, jobs: int = 1, quiet: bool = True) -> Dataset:
    """Steady states of the weakly open Ising chain, one per random bath realization."""
    if kind not in ("rotated", "structured"):
        raise ArgumentError(f"dissipator kind must be 'rotated' or 'structured', got {kind!r}")
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    params = _model(model)
    H = ising_hamiltonian(params["J"], params["h_x"], params["h_z"])
    energy = build_dense(H, N).matrix
    xx = pauli_string_matrix(PauliLabel("xx"), N)
    c2 = build_dense(ising_charge(2, params["J"], params["h_x"]), N).matrix if N > 3 else None

    def one(sample_seed: int):
        if kind == "rotated":
            diss = random_rotated_dissipators(sample_seed, epsilon)
        else:
            diss = structured_dissipators(None, sample_seed, epsilon)
        rho = steady_state(build_liouvillian(H, diss, N), seed=sample_seed).rho
        row = {
            "energy_density": float(np.real(np.einsum("ij,ji->", rho, energy))) / N,
            "xx": float(np.real(np.einsum("ij,ji->", rho, xx))),
            "dissipator": diss.parameters,
        }
        if c2 is not None:
            row["C2_density"] = float(np.real(np.einsum("ij,ji->", rho, c2))) / N
        return observe(rho, support), row

    results = _parallel_map(one, _child_seeds(seed, n), jobs, f"Lindblad ({kind})", quiet)
    annotations = {key: [r[1][key] for r in results] for key in results[0][1]}
    logger.info("generated %d steady states (%s, N=%d, eps=%g)", n, kind, N, epsilon)
    return Dataset.from_observations(
        [r[0] for r in results],
        source=SourceKind.LINDBLAD,
        metadata={
            "kind": kind, "model": model, **params, "N": N, "epsilon": epsilon,
            "support": support, "seed": seed,
            "dissipators": "translationally repeated, random angles/rates per realization",
        },
        annotations=annotations,
    )


def sample_circuit_datasets(n_initial: int = CIRCUIT_DEFAULTS["n_initial"],
                            steps: int = CIRCUIT_DEFAULTS["steps"], L: int = 16,
                            support: int = 3, seed: int = 0,
                            record_steps: Optional[Sequence[int]] = None,
                            fresh_odd_gate: bool = CIRCUIT_DEFAULTS["fresh_odd_gate"],
                            jobs: int = 1, quiet: bool = True) -> Dict[int, Dataset]:
    """One dataset per recorded step, each row from an independent trajectory."""
    if n_initial < 1:
        raise ArgumentError(f"n_initial must be positive, got {n_initial}")
    recorded = sorted(set(default_record_steps(steps) if record_steps is None else record_steps))
    seeds = _child_seeds(seed, n_initial)

    def one(trajectory_seed: int):
        bloch = sample_bloch(np.random.default_rng([trajectory_seed, 1]))
        return run_trajectory(bloch, steps, recorded, seed=trajectory_seed, L=L,
                              support=support, fresh_odd_gate=fresh_odd_gate)

    trajectories = _parallel_map(one, seeds, jobs, "circuit", quiet)
    datasets = {}
    for k, step in enumerate(recorded):
        observations = [t.observations[k] for t in trajectories]
        datasets[step] = Dataset.from_observations(
            observations,
            source=SourceKind.CIRCUIT,
            metadata={
                "L": L, "support": support, "seed": seed, "step": step,
                "time": step * CIRCUIT_DEFAULTS["dt"], "dt": CIRCUIT_DEFAULTS["dt"],
                "n_initial": n_initial, "fresh_odd_gate": fresh_odd_gate,
            },
            annotations={
                "theta": [t.bloch[0] for t in trajectories],
                "phi": [t.bloch[1] for t in trajectories],
                "magnetization": [float(np.cos(t.bloch[0])) for t in trajectories],
                "trajectory_seed": [t.seed for t in trajectories],
            },
        )
    logger.info("generated %d trajectories, %d recorded steps", n_initial, len(recorded))
    return datasets
