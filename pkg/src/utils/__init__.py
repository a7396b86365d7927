# Utility functions
from src.utils.files import atomic_write, atomic_write_text

__all__ = ["atomic_write", "atomic_write_text"]
