"""(Generalized) Gibbs ensembles and Pauli-string observations.

All Gibbs states are built from a dense eigendecomposition of the Hermitian
generator sum_i lambda_i C_i; the spectrum is shifted by its maximum before
exponentiation so large multipliers never overflow.
"""

from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Union
import logging
import math
import threading

import numpy as np
from scipy import linalg, optimize

from src.config.settings import LAGRANGE_RANGE, SIZE_LIMITS
from src.errors import ArgumentError, ConvergenceError, InternalError
from src.models.operators import OperatorSpec, PauliLabel, combine
from src.models.states import GGEState, LagrangeVector, ObservationVector
from src.physics.pauli import build_dense, enumerate_support_strings, local_string_matrices

logger = logging.getLogger(__name__)


def gibbs_from_generator(generator: np.ndarray, hermitian_tol: float = 1e-10) -> np.ndarray:
    """exp(M) / Tr exp(M) for a Hermitian matrix M."""
    scale = max(1.0, float(np.max(np.abs(generator), initial=0.0)))
    if np.max(np.abs(generator - generator.conj().T), initial=0.0) > hermitian_tol * scale:
        raise InternalError("accumulated GGE generator is not Hermitian")
    w, V = linalg.eigh(generator)
    p = np.exp(w - w.max())
    p /= p.sum()
    rho = (V * p) @ V.conj().T
    return 0.5 * (rho + rho.conj().T)


class ChargeSet:
    """Dense charge matrices on a chain of L sites, reused across many states."""

    def __init__(self, charges: Sequence[OperatorSpec], L: int):
        if L > SIZE_LIMITS["gge"]:
            raise ArgumentError(f"GGE size L={L} exceeds the limit of {SIZE_LIMITS['gge']}")
        if not charges:
            raise ArgumentError("at least one charge is required")
        self.charges = list(charges)
        self.L = L
        self.matrices = [build_dense(c, L).matrix for c in self.charges]
        self.charge_ids = [c.name or f"C{i}" for i, c in enumerate(self.charges)]

    def generator(self, lagrange: LagrangeVector) -> np.ndarray:
        if len(lagrange) != len(self.matrices):
            raise ArgumentError(
                f"{len(lagrange)} multipliers given for {len(self.matrices)} charges"
            )
        out = np.zeros_like(self.matrices[0])
        for lam, matrix in zip(lagrange.values, self.matrices):
            out += lam * matrix
        return out

    def state(self, lagrange) -> GGEState:
        if not isinstance(lagrange, LagrangeVector):
            lagrange = LagrangeVector(lagrange)
        rho = gibbs_from_generator(self.generator(lagrange))
        return GGEState(rho=rho, lagrange=lagrange, charge_ids=list(self.charge_ids), L=self.L)

    def expectations(self, rho: np.ndarray) -> np.ndarray:
        """Tr[rho C_i] for every charge."""
        return np.array([np.real(np.einsum("ij,ji->", rho, m)) for m in self.matrices])

    def commutator_norms(self) -> np.ndarray:
        n = len(self.matrices)
        norms = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.matrices[i], self.matrices[j]
                norms[i, j] = norms[j, i] = np.linalg.norm(a @ b - b @ a)
        return norms


def gge_state(charges: Sequence[OperatorSpec], lagrange, L: int,
              check_commuting: bool = False) -> GGEState:
    """Normalized exp(sum_i lambda_i C_i) on L sites."""
    charge_set = ChargeSet(charges, L)
    if check_commuting:
        worst = float(charge_set.commutator_norms().max(initial=0.0))
        if worst > 1e-8:
            raise ArgumentError(f"charges do not commute (||[C_i, C_j]|| = {worst:.2e})")
    return charge_set.state(lagrange)


def charge_densities(state: Union[GGEState, np.ndarray], charges: Sequence[OperatorSpec]) -> np.ndarray:
    """<C_i> / L for each charge."""
    rho = state.rho if isinstance(state, GGEState) else np.asarray(state)
    L = _chain_length(rho)
    return ChargeSet(charges, L).expectations(rho) / L


@lru_cache(maxsize=None)
def _cached_strings(support: int) -> np.ndarray:
    return local_string_matrices(support)


def _chain_length(rho: np.ndarray) -> int:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ArgumentError(f"density matrix must be square, got shape {rho.shape}")
    L = int(round(math.log2(rho.shape[0]))) if rho.shape[0] > 0 else -1
    if L < 1 or 2 ** L != rho.shape[0]:
        raise ArgumentError(f"density matrix dimension {rho.shape[0]} is not a power of two")
    return L


def reduced_to_first_sites(rho: np.ndarray, support: int) -> np.ndarray:
    """Partial trace keeping sites 0 ... support-1."""
    L = _chain_length(rho)
    keep, rest = 2 ** support, 2 ** (L - support)
    return np.einsum("aibi->ab", rho.reshape(keep, rest, keep, rest))


def observe(state: Union[GGEState, np.ndarray], support: int,
            provenance: Optional[Dict[str, Any]] = None) -> ObservationVector:
    """Tr[rho O_1(alpha)] for every canonical label alpha of the support."""
    rho = state.rho if isinstance(state, GGEState) else np.asarray(state)
    L = _chain_length(rho)
    if support > L:
        raise ArgumentError(f"support {support} exceeds chain length {L}")
    if support > SIZE_LIMITS["observation_support_max"]:
        raise ArgumentError(
            f"observation support is limited to {SIZE_LIMITS['observation_support_max']}"
        )
    reduced = reduced_to_first_sites(rho, support)
    values = np.real(np.einsum("kab,ba->k", _cached_strings(support), reduced))
    info = dict(provenance or {})
    if isinstance(state, GGEState):
        info.setdefault("lagrange", state.lagrange.values.tolist())
        info.setdefault("charges", list(state.charge_ids))
        info.setdefault("L", state.L)
    return ObservationVector(
        values=np.clip(values, -1.0, 1.0),
        support=support,
        labels=enumerate_support_strings(support),
        provenance=info,
    )


def thermal_oracle(coeffs: OperatorSpec, support: int, L: int) -> ObservationVector:
    """Observations of the Gibbs state of ``coeffs`` at lambda_0 = 1."""
    state = gge_state([coeffs], [1.0], L)
    return observe(state, support, provenance={"oracle": coeffs.to_dict()})


class ThermalOracle:
    """Thermal observations of sum_alpha a_alpha sum_j O_j(alpha) at lambda_0 = 1.

    Dense candidate matrices are built once; every call costs one eigensolve.
    """

    def __init__(self, candidates: Sequence[PauliLabel], L: int, support: int):
        if L > SIZE_LIMITS["gge"]:
            raise ArgumentError(f"oracle size L={L} exceeds the limit of {SIZE_LIMITS['gge']}")
        self.candidates = [PauliLabel(str(c)).trimmed() for c in candidates]
        self.L = L
        self.support = support
        self.matrices = [
            build_dense(OperatorSpec(terms=((1.0, label),)), L).matrix
            for label in self.candidates
        ]
        self.calls = 0
        self._lock = threading.Lock()

    def spec(self, coefficients: Sequence[float]) -> OperatorSpec:
        return OperatorSpec(
            terms=tuple((float(a), label) for a, label in zip(coefficients, self.candidates)),
            name="candidate",
        )

    def __call__(self, coefficients: Sequence[float]) -> np.ndarray:
        with self._lock:
            self.calls += 1
        generator = np.zeros_like(self.matrices[0])
        for a, matrix in zip(coefficients, self.matrices):
            generator += a * matrix
        rho = gibbs_from_generator(generator)
        return observe(rho, self.support).values


def sample_lagrange(n: int, n_charges: int, rng: np.random.Generator, J: float = 1.0) -> np.ndarray:
    """Multipliers drawn uniformly from [-2/J, 2/J] per component."""
    bound = LAGRANGE_RANGE / abs(J)
    return rng.uniform(-bound, bound, size=(n, n_charges))


def fit_gibbs_multiplier(hamiltonian: np.ndarray, energy: float,
                         bracket: Sequence[float] = (-50.0, 50.0)) -> float:
    """lambda_0 with Tr[H exp(lambda_0 H)] / Z = energy."""
    w = linalg.eigvalsh(hamiltonian)

    def mean_energy(lam: float) -> float:
        p = np.exp(lam * w - np.max(lam * w))
        return float(np.dot(p, w) / p.sum())

    lo, hi = bracket
    e_lo, e_hi = mean_energy(lo), mean_energy(hi)
    if not e_lo <= energy <= e_hi:
        raise ArgumentError(
            f"energy {energy:.6g} outside the thermal range [{e_lo:.6g}, {e_hi:.6g}]"
        )
    return float(optimize.brentq(lambda lam: mean_energy(lam) - energy, lo, hi, xtol=1e-14))


def fit_lagrange_multipliers(charge_set: ChargeSet, targets: Sequence[float],
                             initial: Optional[Sequence[float]] = None,
                             tol: float = 1e-10) -> LagrangeVector:
    """Solve Tr[rho_lambda C_i] = targets_i for lambda."""
    targets = np.asarray(targets, dtype=float)
    x0 = np.zeros(len(charge_set.matrices)) if initial is None else np.asarray(initial, float)

    def residual(lam: np.ndarray) -> np.ndarray:
        rho = gibbs_from_generator(charge_set.generator(LagrangeVector(lam)))
        return charge_set.expectations(rho) - targets

    result = optimize.root(residual, x0, method="hybr", tol=tol)
    if not result.success:
        raise ConvergenceError(f"Lagrange multiplier fit failed: {result.message}")
    logger.debug("Lagrange fit converged after %s evaluations", result.nfev)
    return LagrangeVector(result.x)
