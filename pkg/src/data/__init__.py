from src.data.generators import sample_circuit_datasets, sample_gge_dataset, sample_lindblad_dataset
from src.data.store import load, save, split

__all__ = [
    "sample_gge_dataset",
    "sample_lindblad_dataset",
    "sample_circuit_datasets",
    "split",
    "save",
    "load",
]
