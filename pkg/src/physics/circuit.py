"""U(1)-symmetric random brickwork circuits on a dense statevector."""

from functools import reduce
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from src.config.settings import CIRCUIT_DEFAULTS, SIZE_LIMITS
from src.errors import ArgumentError
from src.models.states import GateParams, StateVector, TrajectoryRecord
from src.physics.gge import observe

logger = logging.getLogger(__name__)


def sample_gate_params(rng: np.random.Generator, dt: float = CIRCUIT_DEFAULTS["dt"]) -> GateParams:
    theta1, theta2 = rng.uniform(-np.pi, np.pi, size=2)
    c = rng.uniform(-np.pi / 2, np.pi / 2)
    return GateParams(theta1=float(theta1), theta2=float(theta2), c=float(c), dt=dt)


def gate_unitary(params: GateParams) -> np.ndarray:
    """exp(-i dt H(a, b, c)) in the basis (up up, up down, down up, down down).

    H = a (S+S- + S-S+) + b zz + c (z1 + z2) is block diagonal in the
    magnetization sectors, so only the one-flip sector needs a 2x2 rotation.
    """
    dt, a, b, c = params.dt, params.a, params.b, params.c
    U = np.zeros((4, 4), dtype=complex)
    U[0, 0] = np.exp(-1j * dt * (b + 2 * c))
    U[3, 3] = np.exp(-1j * dt * (b - 2 * c))
    phase = np.exp(1j * dt * b)
    U[1, 1] = U[2, 2] = phase * np.cos(dt * a)
    U[1, 2] = U[2, 1] = -1j * phase * np.sin(dt * a)
    return U


def sample_gate(rng: np.random.Generator, dt: float = CIRCUIT_DEFAULTS["dt"]) -> np.ndarray:
    return gate_unitary(sample_gate_params(rng, dt))


def _check_chain(L: int):
    if L % 2 or L < SIZE_LIMITS["circuit_min"] or L > SIZE_LIMITS["circuit_max"]:
        raise ArgumentError(
            f"brickwork chain needs even L in [{SIZE_LIMITS['circuit_min']}, "
            f"{SIZE_LIMITS['circuit_max']}], got {L}"
        )


def _apply_pairs(tensor: np.ndarray, gate: np.ndarray) -> np.ndarray:
    """Apply the gate on sites (0,1), (2,3), ... of a (2,)*L tensor."""
    L = tensor.ndim
    pairs = tensor.reshape((4,) * (L // 2))
    for k in range(L // 2):
        pairs = np.moveaxis(np.tensordot(gate, pairs, axes=([1], [k])), 0, k)
    return pairs.reshape((2,) * L)


def brickwork_step(state: StateVector, gate: np.ndarray,
                   odd_gate: Optional[np.ndarray] = None) -> StateVector:
    """Gate on every even link, then ``odd_gate`` (default: same gate) on every odd link."""
    _check_chain(state.L)
    gate = np.asarray(gate, dtype=complex)
    odd_gate = gate if odd_gate is None else np.asarray(odd_gate, dtype=complex)
    if gate.shape != (4, 4) or odd_gate.shape != (4, 4):
        raise ArgumentError("brickwork gates must be 4x4")
    psi = _apply_pairs(state.tensor(), gate)
    # sites 1..L-1, 0 so the odd links become pairs (1,2), ..., (L-1,0)
    psi = np.moveaxis(psi, 0, -1)
    psi = np.moveaxis(_apply_pairs(psi, odd_gate), -1, 0)
    return StateVector(amplitudes=psi.reshape(-1), L=state.L)


def reduced_density_matrix(state: StateVector, support: int) -> np.ndarray:
    """RDM of ``support`` consecutive sites, averaged over all L window positions."""
    L = state.L
    if support < 1 or support > L // 2:
        raise ArgumentError(f"support must be in [1, {L // 2}], got {support}")
    tensor = state.tensor()
    dim = 2 ** support
    rdm = np.zeros((dim, dim), dtype=complex)
    for shift in range(L):
        order = [(shift + k) % L for k in range(L)]
        block = tensor.transpose(order).reshape(dim, -1)
        rdm += block @ block.conj().T
    rdm /= L
    return 0.5 * (rdm + rdm.conj().T)


def product_state(theta: float, phi: float, L: int) -> StateVector:
    """(cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>)^{tensor L}."""
    site = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)
    return StateVector(amplitudes=reduce(np.kron, [site] * L), L=L)


def neel_state(L: int) -> StateVector:
    amplitudes = np.zeros(2 ** L, dtype=complex)
    index = int("01" * (L // 2), 2)  # up, down, up, ...
    amplitudes[index] = 1.0
    return StateVector(amplitudes=amplitudes, L=L)


def sample_bloch(rng: np.random.Generator) -> Tuple[float, float]:
    """Uniform point on the Bloch sphere."""
    theta = float(np.arccos(rng.uniform(-1.0, 1.0)))
    phi = float(rng.uniform(-np.pi, np.pi))
    return theta, phi


def default_record_steps(steps: int, dt: float = CIRCUIT_DEFAULTS["dt"],
                         n_log: int = 20) -> List[int]:
    """Every step up to t = 1, logarithmically spaced afterwards."""
    if steps < 1:
        raise ArgumentError(f"steps must be positive, got {steps}")
    dense_until = min(steps, int(round(1.0 / dt)))
    recorded = list(range(dense_until + 1))
    if steps > dense_until:
        tail = np.logspace(np.log10(dense_until + 1), np.log10(steps), n_log)
        recorded.extend(int(s) for s in np.unique(np.round(tail).astype(int)))
    return sorted(set(recorded))


def run_trajectory(bloch: Tuple[float, float], steps: int,
                   record_steps: Optional[Sequence[int]] = None, seed: int = 0,
                   L: int = 16, support: int = 3,
                   dt: float = CIRCUIT_DEFAULTS["dt"],
                   fresh_odd_gate: bool = CIRCUIT_DEFAULTS["fresh_odd_gate"]) -> TrajectoryRecord:
    """Evolve a product state with fresh random gates each step and record observations."""
    _check_chain(L)
    if steps < 1:
        raise ArgumentError(f"steps must be positive, got {steps}")
    recorded = sorted(set(default_record_steps(steps, dt) if record_steps is None else record_steps))
    if recorded and (recorded[0] < 0 or recorded[-1] > steps):
        raise ArgumentError(f"record steps must lie in [0, {steps}]")

    rng = np.random.default_rng(seed)
    state = product_state(bloch[0], bloch[1], L)
    observations, gates = [], []
    targets = set(recorded)

    def record():
        provenance = {"step": len(gates), "time": len(gates) * dt, "bloch": list(bloch), "seed": seed}
        observations.append(observe(reduced_density_matrix(state, support), support, provenance))

    if 0 in targets:
        record()
    for step in range(1, steps + 1):
        even = sample_gate_params(rng, dt)
        odd = sample_gate_params(rng, dt) if fresh_odd_gate else even
        state = brickwork_step(state, gate_unitary(even), gate_unitary(odd))
        gates.append((even, odd))
        if step in targets:
            record()
    logger.debug("trajectory seed=%s finished, norm=%.12f", seed, state.norm)
    return TrajectoryRecord(
        observations=observations,
        steps=recorded,
        times=[s * dt for s in recorded],
        seed=seed,
        bloch=(float(bloch[0]), float(bloch[1])),
        L=L,
        gates=gates,
    )
