"""Pauli-string labels and operator specifications."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple
import json
import math

import numpy as np

from src.errors import ArgumentError

# Lexicographic order of single-site symbols
SYMBOLS = "0xyz"


@dataclass(frozen=True, order=False)
class PauliLabel:
    """String of single-site symbols over {0, x, y, z} on consecutive sites."""
    symbols: str

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise ArgumentError("Pauli label must act on at least one site")
        bad = [s for s in self.symbols if s not in SYMBOLS]
        if bad:
            raise ArgumentError(f"invalid Pauli symbols {bad!r} in label {self.symbols!r}")

    @property
    def support(self) -> int:
        return len(self.symbols)

    @property
    def is_identity(self) -> bool:
        return set(self.symbols) == {"0"}

    @property
    def canonical(self) -> bool:
        """Left-aligned (first symbol non-identity) or the pure identity."""
        return self.symbols[0] != "0" or self.is_identity

    def trimmed(self) -> "PauliLabel":
        """Label with trailing identities removed."""
        stripped = self.symbols.rstrip("0")
        return PauliLabel(stripped or "0")

    def padded(self, support: int) -> "PauliLabel":
        """Label extended with trailing identities to the given support."""
        if support < self.support:
            raise ArgumentError(f"cannot pad {self.symbols!r} down to support {support}")
        return PauliLabel(self.symbols + "0" * (support - self.support))

    def sort_key(self) -> Tuple[int, ...]:
        return tuple(SYMBOLS.index(s) for s in self.symbols)

    def __str__(self) -> str:
        return self.symbols


@dataclass(frozen=True)
class OperatorSpec:
    """Weighted sum of Pauli strings, optionally summed over all lattice offsets.

    With ``translationally_invariant`` set, the spec denotes
    ``sum_j sum_alpha a_alpha O_j(alpha)`` with periodic wrap.
    """
    terms: Tuple[Tuple[float, PauliLabel], ...]
    translationally_invariant: bool = True
    name: str = ""

    def __post_init__(self):
        normalized = []
        for coefficient, label in self.terms:
            if not isinstance(label, PauliLabel):
                label = PauliLabel(str(label))
            coefficient = float(coefficient)
            if not math.isfinite(coefficient):
                raise ArgumentError(f"non-finite coefficient for {label}")
            if not label.canonical:
                raise ArgumentError(f"label {label} is not canonical (leading identity)")
            normalized.append((coefficient, label))
        object.__setattr__(self, "terms", tuple(normalized))

    @property
    def support(self) -> int:
        if not self.terms:
            return 1
        return max(label.support for _, label in self.terms)

    @property
    def labels(self) -> List[PauliLabel]:
        return [label for _, label in self.terms]

    def coefficient_map(self) -> Dict[str, float]:
        """Coefficients keyed by trimmed label string, duplicates summed."""
        merged: Dict[str, float] = {}
        for coefficient, label in self.terms:
            key = label.trimmed().symbols
            merged[key] = merged.get(key, 0.0) + coefficient
        return merged

    def scaled(self, factor: float) -> "OperatorSpec":
        return OperatorSpec(
            terms=tuple((factor * c, label) for c, label in self.terms),
            translationally_invariant=self.translationally_invariant,
            name=self.name,
        )

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "name": self.name,
            "translationally_invariant": self.translationally_invariant,
            "support": self.support,
            "terms": [[c, label.symbols] for c, label in self.terms],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "OperatorSpec":
        try:
            terms = tuple((float(c), PauliLabel(str(s))) for c, s in data["terms"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"malformed operator record: {exc}") from exc
        return cls(
            terms=terms,
            translationally_invariant=bool(data.get("translationally_invariant", True)),
            name=data.get("name", ""),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "OperatorSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_coefficients(cls, coefficients: Dict[str, float], name: str = "",
                          drop_zeros: bool = True) -> "OperatorSpec":
        terms = tuple(
            (c, PauliLabel(s)) for s, c in coefficients.items()
            if not (drop_zeros and c == 0.0)
        )
        return cls(terms=terms, name=name)


def combine(specs: Iterable[OperatorSpec], weights: Iterable[float],
            name: str = "") -> OperatorSpec:
    """Single spec for ``sum_i w_i spec_i``; identical labels are merged."""
    merged: Dict[str, float] = {}
    order: List[str] = []
    for spec, weight in zip(specs, weights):
        if not spec.translationally_invariant:
            raise ArgumentError("combine expects translationally invariant specs")
        for coefficient, label in spec.terms:
            key = label.symbols
            if key not in merged:
                merged[key] = 0.0
                order.append(key)
            merged[key] += float(weight) * coefficient
    return OperatorSpec(
        terms=tuple((merged[k], PauliLabel(k)) for k in order),
        name=name,
    )


@dataclass
class DenseOperator:
    """Dense 2^L x 2^L matrix of an operator on a chain of L sites."""
    matrix: np.ndarray
    L: int
    source: str = ""

    def __post_init__(self):
        dim = 2 ** self.L
        if self.matrix.shape != (dim, dim):
            raise ArgumentError(
                f"matrix shape {self.matrix.shape} does not match L={self.L}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def commutator_norm(self, other: "DenseOperator") -> float:
        """Frobenius norm of [self, other]."""
        a, b = self.matrix, other.matrix
        return float(np.linalg.norm(a @ b - b @ a))

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.matrix @ other.matrix, self.L)
