"""Observation datasets and their train/test split."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.errors import ArgumentError
from src.models.operators import PauliLabel
from src.models.states import ObservationVector


class SourceKind(Enum):
    """Physical origin of a dataset."""
    GGE = "gge"
    LINDBLAD = "lindblad"
    CIRCUIT = "circuit"
    EXTERNAL = "external"


@dataclass
class Split:
    """Disjoint train/test row indices covering the dataset."""
    train: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        self.train = np.asarray(self.train, dtype=int)
        self.test = np.asarray(self.test, dtype=int)

    def validate(self, n_rows: int):
        if len(self.train) == 0 or len(self.test) == 0:
            raise ArgumentError("split leaves one side empty")
        joined = np.concatenate([self.train, self.test])
        if len(np.unique(joined)) != len(joined):
            raise ArgumentError("train and test indices overlap")
        if len(joined) != n_rows or joined.min() < 0 or joined.max() >= n_rows:
            raise ArgumentError(f"split does not cover the {n_rows} dataset rows")

    def to_dict(self) -> Dict[str, List[int]]:
        return {"train": self.train.tolist(), "test": self.test.tolist()}


@dataclass
class Dataset:
    """Rows of Pauli-string expectation values with provenance.

    ``annotations`` holds per-row physical observables (energy density,
    Lagrange multipliers, times ...), one list entry per row.
    """
    values: np.ndarray
    support: int
    labels: List[str]
    source: SourceKind = SourceKind.EXTERNAL
    metadata: Dict[str, Any] = field(default_factory=dict)
    annotations: Dict[str, List[Any]] = field(default_factory=dict)
    split: Optional[Split] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ArgumentError(f"dataset values must be a matrix, got shape {self.values.shape}")
        expected = 3 * 4 ** (self.support - 1)
        if self.values.shape[1] != expected:
            raise ArgumentError(
                f"support {self.support} needs {expected} columns, got {self.values.shape[1]}"
            )
        if len(self.labels) != expected:
            raise ArgumentError(f"{len(self.labels)} labels for {expected} columns")
        if isinstance(self.source, str):
            self.source = SourceKind(self.source)
        for key, column in self.annotations.items():
            if len(column) != self.n_rows:
                raise ArgumentError(f"annotation {key!r} has {len(column)} entries for {self.n_rows} rows")
        if self.split is not None:
            self.split.validate(self.n_rows)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def rows(self) -> List[ObservationVector]:
        labels = [PauliLabel(s) for s in self.labels]
        return [
            ObservationVector(values=row, support=self.support, labels=labels)
            for row in self.values
        ]

    @property
    def train(self) -> np.ndarray:
        if self.split is None:
            raise ArgumentError("dataset has no train/test split")
        return self.values[self.split.train]

    @property
    def test(self) -> np.ndarray:
        if self.split is None:
            raise ArgumentError("dataset has no train/test split")
        return self.values[self.split.test]

    def annotation(self, key: str) -> np.ndarray:
        if key not in self.annotations:
            raise ArgumentError(
                f"dataset has no annotation {key!r}; available: {sorted(self.annotations)}"
            )
        return np.asarray(self.annotations[key], dtype=float)

    def column(self, label: str) -> np.ndarray:
        key = PauliLabel(label).padded(self.support).symbols
        try:
            return self.values[:, self.labels.index(key)]
        except ValueError as exc:
            raise ArgumentError(f"dataset has no column {label!r}") from exc

    @classmethod
    def from_observations(cls, observations: Sequence[ObservationVector],
                          source: SourceKind = SourceKind.EXTERNAL,
                          metadata: Optional[Dict[str, Any]] = None,
                          annotations: Optional[Dict[str, List[Any]]] = None) -> "Dataset":
        if not observations:
            raise ArgumentError("cannot build a dataset from zero observations")
        support = observations[0].support
        if any(o.support != support for o in observations):
            raise ArgumentError("all observations must share the same support")
        return cls(
            values=np.stack([o.values for o in observations]),
            support=support,
            labels=[str(label) for label in observations[0].labels],
            source=source,
            metadata=dict(metadata or {}),
            annotations=dict(annotations or {}),
        )
