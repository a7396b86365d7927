"""Artifact file helpers."""

from pathlib import Path
from typing import Callable, Union
import os
import tempfile


def atomic_write(path: Union[str, Path], writer: Callable[[Path], None]):
    """Let ``writer`` fill a temporary sibling of ``path``, then rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    os.close(fd)
    try:
        writer(Path(tmp))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def atomic_write_text(path: Union[str, Path], text: str):
    atomic_write(path, lambda tmp: tmp.write_text(text, encoding="utf-8"))
