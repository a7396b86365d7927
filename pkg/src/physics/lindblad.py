"""Vectorized Liouvillians and their steady states.

Row-stacking convention: vec(A rho B) = (A kron B^T) vec(rho), so the
unitary part is -i (H kron I - I kron H^T) and each jump operator L adds
L kron conj(L) - 1/2 (L^dag L) kron I - 1/2 I kron (L^dag L)^T.
"""

from typing import Optional, Sequence
import logging

import numpy as np
import scipy.sparse as sp
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigs

from src.config.settings import LINDBLAD_DEFAULTS, SIZE_LIMITS
from src.errors import ArgumentError, ConvergenceError, DegeneracyError, InternalError, ResourceError
from src.models.operators import OperatorSpec
from src.models.states import LindbladSpec, LindbladTerm, Liouvillian, SteadyState
from src.physics.gge import fit_gibbs_multiplier, gibbs_from_generator
from src.physics.pauli import PAULI, build_dense, embed_local

logger = logging.getLogger(__name__)

SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up|
PROJ_UP = 0.5 * (PAULI["0"] + PAULI["z"])
PROJ_DOWN = 0.5 * (PAULI["0"] - PAULI["z"])

# Spin flips and projectors along x
S_PLUS_X = 0.5 * (-PAULI["z"] + 1j * PAULI["y"])
S_MINUS_X = 0.5 * (-PAULI["z"] - 1j * PAULI["y"])
P_UP_X = 0.5 * (PAULI["0"] + PAULI["x"])
P_DOWN_X = 0.5 * (PAULI["0"] - PAULI["x"])


def rotation_z(angle: float) -> np.ndarray:
    """exp(-i angle sigma^z / 2)."""
    return linalg.expm(-0.5j * angle * PAULI["z"])


def rotation_y(angle: float) -> np.ndarray:
    """exp(-i angle sigma^y / 2)."""
    return linalg.expm(-0.5j * angle * PAULI["y"])


def rotated(op: np.ndarray, zeta: float, phi: float) -> np.ndarray:
    """R_z(zeta) R_y(phi) op R_y^-1(phi) R_z^-1(zeta)."""
    R = rotation_z(zeta) @ rotation_y(phi)
    return R @ op @ R.conj().T


def rotated_projector(zeta: float, phi: float) -> np.ndarray:
    return rotated(PROJ_UP, zeta, phi)


def random_rotated_dissipators(seed: int, epsilon: float = LINDBLAD_DEFAULTS["epsilon"],
                               angles: Optional[Sequence[float]] = None) -> LindbladSpec:
    """Rotated single-site projector and rotated two-site decay operator.

    ``angles`` = (zeta, phi, zeta', phi') overrides the seeded draw.
    """
    if angles is None:
        rng = np.random.default_rng(seed)
        angles = rng.uniform(-np.pi, np.pi, size=4)
    zeta, phi, zeta_p, phi_p = (float(a) for a in angles)
    single = LindbladTerm(rotated_projector(zeta_p, phi_p), name="L1")
    pair = LindbladTerm(np.kron(rotated(SIGMA_MINUS, zeta, phi), PROJ_DOWN), name="L2")
    return LindbladSpec(
        operators=[single, pair],
        epsilon=epsilon,
        kind="rotated",
        parameters={"seed": seed, "zeta": zeta, "phi": phi, "zeta_prime": zeta_p, "phi_prime": phi_p},
    )


def structured_dissipators(rates: Optional[Sequence[float]], seed: int,
                           epsilon: float = LINDBLAD_DEFAULTS["epsilon"]) -> LindbladSpec:
    """Baths promoting antiferromagnetic x correlations plus unit-rate dephasing.

    When ``rates`` is None the four rates are drawn uniformly from [0, 1].
    """
    if rates is None:
        rates = np.random.default_rng(seed).uniform(0.0, 1.0, size=4)
    rates = [float(r) for r in rates]
    if len(rates) != 4:
        raise ArgumentError(f"structured baths need four rates, got {len(rates)}")
    for r in rates:
        if not 0.0 <= r <= 1.0:
            raise ArgumentError(f"structured bath rates must lie in [0, 1], got {r}")
    operators = [
        LindbladTerm(np.kron(S_PLUS_X, P_DOWN_X), rates[0], name="L1"),
        LindbladTerm(np.kron(P_DOWN_X, S_PLUS_X), rates[1], name="L2"),
        LindbladTerm(np.kron(S_MINUS_X, P_UP_X), rates[2], name="L3"),
        LindbladTerm(np.kron(P_UP_X, S_MINUS_X), rates[3], name="L4"),
        LindbladTerm(PAULI["z"], 1.0, name="L5"),
    ]
    return LindbladSpec(
        operators=operators,
        epsilon=epsilon,
        kind="structured",
        parameters={"seed": seed, "rates": rates},
    )


def _dissipator(jump: sp.csr_matrix, identity: sp.csr_matrix) -> sp.csr_matrix:
    decay = (jump.conj().T @ jump).tocsr()
    return (
        sp.kron(jump, jump.conj())
        - 0.5 * sp.kron(decay, identity)
        - 0.5 * sp.kron(identity, decay.T)
    )


def build_liouvillian(H: OperatorSpec, diss: LindbladSpec, N: int) -> Liouvillian:
    """Sparse superoperator of -i[H, rho] + epsilon sum_j sum_gamma D[L_j^gamma]."""
    if N > SIZE_LIMITS["liouvillian"]:
        raise ResourceError(
            f"Liouvillian of N={N} sites exceeds the limit of {SIZE_LIMITS['liouvillian']}"
        )
    dim = 2 ** N
    identity = sp.identity(dim, dtype=complex, format="csr")
    h = sp.csr_matrix(build_dense(H, N).matrix)
    superop = -1j * (sp.kron(h, identity) - sp.kron(identity, h.T))

    if diss.epsilon > 0:
        for term in diss.operators:
            if term.rate == 0.0:
                continue
            if term.n_sites > N:
                raise ArgumentError(f"{term.name} acts on {term.n_sites} sites, chain has {N}")
            for j in range(N):
                sites = [(j + term.offset + k) % N for k in range(term.n_sites)]
                jump = sp.csr_matrix(embed_local(term.matrix, sites, N))
                superop = superop + (diss.epsilon * term.rate) * _dissipator(jump, identity)

    superop = sp.csr_matrix(superop)
    superop.eliminate_zeros()
    logger.debug("assembled Liouvillian N=%d nnz=%d", N, superop.nnz)
    return Liouvillian(superoperator=superop, N=N)


def _finish(vector: np.ndarray, liouvillian: Liouvillian, method: str) -> SteadyState:
    dim = 2 ** liouvillian.N
    rho = vector.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    trace = np.trace(rho).real
    if abs(trace) < 1e-14:
        raise InternalError("null vector has vanishing trace")
    rho = rho / trace
    residual = float(np.linalg.norm(liouvillian.superoperator @ rho.reshape(-1)))
    if residual > LINDBLAD_DEFAULTS["tol"]:
        raise ConvergenceError(f"steady-state residual {residual:.2e} above tolerance ({method})")
    min_eig = float(linalg.eigvalsh(rho)[0])
    if min_eig < -1e-8:
        logger.warning("steady state has negative eigenvalue %.2e", min_eig)
    return SteadyState(rho=rho, residual=residual, N=liouvillian.N, method=method)


def steady_state(liouvillian: Liouvillian, seed: int = 0,
                 threshold: float = LINDBLAD_DEFAULTS["degeneracy_threshold"],
                 max_iter: int = LINDBLAD_DEFAULTS["max_iter"]) -> SteadyState:
    """Unique zero mode of the Liouvillian as a density matrix.

    Dense SVD up to the dense null-space limit, shift-invert Arnoldi above it.
    """
    if liouvillian.N <= SIZE_LIMITS["dense_null_space"]:
        _, s, vh = linalg.svd(liouvillian.superoperator.toarray())
        if s[-2] < threshold:
            raise DegeneracyError(
                f"Liouvillian zero mode is degenerate (second singular value {s[-2]:.2e})"
            )
        return _finish(vh[-1].conj(), liouvillian, "dense-svd")

    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(liouvillian.dim) + 1j * rng.standard_normal(liouvillian.dim)
    try:
        values, vectors = eigs(
            liouvillian.superoperator.tocsc(), k=2, sigma=1e-6, which="LM",
            v0=v0, tol=1e-13, maxiter=max_iter,
        )
    except ArpackNoConvergence as exc:
        raise ConvergenceError(f"shift-invert iteration did not converge: {exc}") from exc
    order = np.argsort(np.abs(values))
    if abs(values[order[1]]) < threshold:
        raise DegeneracyError(
            f"Liouvillian zero mode is degenerate (|lambda_2| = {abs(values[order[1]]):.2e})"
        )
    return _finish(vectors[:, order[0]], liouvillian, "shift-invert")


def distance_to_matched_gibbs(rho: np.ndarray, H: OperatorSpec, N: int) -> float:
    """Frobenius distance between rho and the Gibbs state of H with equal energy."""
    h = build_dense(H, N).matrix
    energy = float(np.real(np.einsum("ij,ji->", rho, h)))
    lam = fit_gibbs_multiplier(h, energy)
    return float(np.linalg.norm(rho - gibbs_from_generator(lam * h)))
