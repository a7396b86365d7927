"""Pauli-string algebra and dense operators on periodic spin chains.

Basis convention: site 0 is the leftmost Kronecker factor (most significant
bit) and |up> = |0> is the +1 eigenstate of sigma^z.
"""

from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple
import logging

import numpy as np

from src.config.settings import SIZE_LIMITS
from src.errors import ArgumentError
from src.models.operators import SYMBOLS, DenseOperator, OperatorSpec, PauliLabel

logger = logging.getLogger(__name__)

PAULI = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def enumerate_support_strings(support: int) -> List[PauliLabel]:
    """All left-aligned non-identity labels of the given support, lexicographic."""
    if not 1 <= support <= SIZE_LIMITS["support_max"]:
        raise ArgumentError(
            f"support must be in [1, {SIZE_LIMITS['support_max']}], got {support}"
        )
    return list(_support_strings(support))


@lru_cache(maxsize=None)
def _support_strings(support: int) -> Tuple[PauliLabel, ...]:
    labels = []
    for first in SYMBOLS[1:]:
        for rest in product(SYMBOLS, repeat=support - 1):
            labels.append(PauliLabel(first + "".join(rest)))
    return tuple(labels)


def _string_action(placements: Sequence[Tuple[int, str]], L: int):
    """Row indices and phases of a Pauli string: P|b> = phase(b) |rows(b)>."""
    idx = np.arange(2 ** L)
    flip = 0
    phase = np.ones(2 ** L, dtype=complex)
    for site, symbol in placements:
        shift = L - 1 - site
        bit = (idx >> shift) & 1
        if symbol == "x":
            flip |= 1 << shift
        elif symbol == "y":
            flip |= 1 << shift
            phase *= np.where(bit == 0, 1j, -1j)
        elif symbol == "z":
            phase *= np.where(bit == 0, 1.0, -1.0)
    return idx ^ flip, idx, phase


def pauli_string_matrix(label: PauliLabel, L: int, offset: int = 0) -> np.ndarray:
    """Dense matrix of ``label`` placed on sites offset, offset+1, ... (mod L)."""
    matrix = np.zeros((2 ** L, 2 ** L), dtype=complex)
    placements = [((offset + k) % L, s) for k, s in enumerate(label.symbols) if s != "0"]
    rows, cols, phase = _string_action(placements, L)
    matrix[rows, cols] = phase
    return matrix


def local_string_matrices(support: int) -> np.ndarray:
    """Stack of 2^s x 2^s matrices for every canonical label of the support."""
    labels = enumerate_support_strings(support)
    return np.stack([pauli_string_matrix(label, support) for label in labels])


def _check_size(spec: OperatorSpec, L: int, periodic: bool):
    limit = SIZE_LIMITS["dense_operator"]
    if L > limit:
        raise ArgumentError(f"L={L} exceeds the dense limit of {limit} sites")
    if L < spec.support:
        raise ArgumentError(f"L={L} is smaller than the operator support {spec.support}")
    reach = max((label.trimmed().support for label in spec.labels), default=1)
    if periodic and spec.translationally_invariant and reach > 1 and L <= reach:
        raise ArgumentError(
            f"periodic translation sum needs L > support ({reach}), got L={L}"
        )


def build_dense(spec: OperatorSpec, L: int, periodic: bool = True) -> DenseOperator:
    """Dense 2^L matrix of ``spec``; invariant specs are summed over all offsets."""
    _check_size(spec, L, periodic)
    dim = 2 ** L
    matrix = np.zeros((dim, dim), dtype=complex)
    for coefficient, label in spec.terms:
        if coefficient == 0.0:
            continue
        if label.is_identity:
            count = L if spec.translationally_invariant else 1
            matrix[np.diag_indices(dim)] += coefficient * count
            continue
        reach = label.trimmed().support
        if spec.translationally_invariant:
            offsets = range(L) if periodic else range(L - reach + 1)
        else:
            offsets = [0]
        for offset in offsets:
            placements = [((offset + k) % L, s) for k, s in enumerate(label.symbols) if s != "0"]
            rows, cols, phase = _string_action(placements, L)
            matrix[rows, cols] += coefficient * phase
    return DenseOperator(matrix=matrix, L=L, source=spec.name)


def embed_local(matrix: np.ndarray, sites: Sequence[int], L: int) -> np.ndarray:
    """Place a 2^k x 2^k local operator on the given (possibly wrapping) sites."""
    k = len(sites)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2 ** k, 2 ** k):
        raise ArgumentError(f"local operator shape {matrix.shape} does not act on {k} sites")
    if len(set(s % L for s in sites)) != k:
        raise ArgumentError(f"sites {list(sites)} overlap on a chain of {L}")
    targets = [s % L for s in sites]
    full = np.kron(matrix, np.eye(2 ** (L - k), dtype=complex)).reshape((2,) * (2 * L))
    order = targets + [s for s in range(L) if s not in targets]
    perm = [order.index(s) for s in range(L)]
    full = full.transpose(perm + [p + L for p in perm])
    return full.reshape(2 ** L, 2 ** L)


def translation_operator(L: int) -> np.ndarray:
    """Permutation matrix of the one-site cyclic shift."""
    idx = np.arange(2 ** L).reshape((2,) * L)
    perm = np.moveaxis(idx, 0, -1).reshape(-1)
    T = np.zeros((2 ** L, 2 ** L))
    T[np.arange(2 ** L), perm] = 1.0
    return T


def ising_hamiltonian(J: float = 1.0, h_x: float = 0.6, h_z: float = 0.0) -> OperatorSpec:
    """Quantum Ising chain sum_j J z_j z_{j+1} + h_x x_j + h_z z_j."""
    return OperatorSpec.from_coefficients(
        {"zz": J, "x": h_x, "z": h_z}, name=f"ising(J={J},h_x={h_x},h_z={h_z})"
    )


def _string(a: str, b: str, distance: int) -> str:
    # S^{ab}_{j,j+d} = sigma^a_j sigma^x_{j+1} ... sigma^x_{j+d-1} sigma^b_{j+d}
    return a + "x" * (distance - 1) + b


def ising_charge(k: int, J: float = 1.0, h_x: float = 0.6) -> OperatorSpec:
    """Local conserved charge C_k of the transverse-field Ising chain.

    C_0 is the Hamiltonian, even k gives C_{2m} and odd k gives C_{2m-1}.
    """
    if k < 0:
        raise ArgumentError(f"charge index must be non-negative, got {k}")
    if k == 0:
        spec = ising_hamiltonian(J, h_x, 0.0)
        return OperatorSpec(terms=spec.terms, name="C0")
    if k % 2 == 1:
        m = (k + 1) // 2
        terms = [(J, _string("y", "z", m)), (-J, _string("z", "y", m))]
    elif k == 2:
        terms = [(J, _string("z", "z", 2)), (-h_x, "yy"), (-h_x, "zz"), (-J, "x")]
    else:
        m = k // 2
        terms = [
            (J, _string("z", "z", m + 1)),
            (-h_x, _string("y", "y", m)),
            (-h_x, _string("z", "z", m)),
            (J, _string("y", "y", m - 1)),
        ]
    return OperatorSpec(
        terms=tuple((c, PauliLabel(s)) for c, s in terms if c != 0.0),
        name=f"C{k}",
    )


def ising_charges(n_charges: int, J: float = 1.0, h_x: float = 0.6) -> List[OperatorSpec]:
    """The n most local charges C_0 ... C_{n-1}."""
    if n_charges < 1:
        raise ArgumentError(f"need at least one charge, got {n_charges}")
    return [ising_charge(k, J, h_x) for k in range(n_charges)]
