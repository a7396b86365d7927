from src.models.operators import PauliLabel, OperatorSpec, DenseOperator, combine
from src.models.states import (
    GGEState,
    LagrangeVector,
    ObservationVector,
    LindbladSpec,
    LindbladTerm,
    SteadyState,
    StateVector,
)
from src.models.dataset import Dataset, SourceKind, Split

__all__ = [
    "PauliLabel",
    "OperatorSpec",
    "DenseOperator",
    "combine",
    "GGEState",
    "LagrangeVector",
    "ObservationVector",
    "LindbladSpec",
    "LindbladTerm",
    "SteadyState",
    "StateVector",
    "Dataset",
    "SourceKind",
    "Split",
]
