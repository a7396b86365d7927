"""Dataset splitting and persistence.

A dataset named ``ge`` is stored as three text files:

  ge.obs    first line ``# <label>,<label>,...``, then one row per observation
            vector, comma separated, 17 significant digits per value
  ge.meta   JSON document validated by :class:`DatasetMeta`
  ge.split  two lines ``train: i,j,...`` and ``test: k,l,...`` (only when split)
"""

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import logging

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from src.config.settings import NETWORK_DEFAULTS
from src.errors import ArgumentError, ParseError
from src.models.dataset import Dataset, SourceKind, Split
from src.utils.files import atomic_write_text

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class DatasetMeta(BaseModel):
    """Structured sidecar describing where a dataset came from."""
    format_version: int = Field(FORMAT_VERSION, description="Sidecar layout version")
    source: SourceKind = Field(SourceKind.EXTERNAL, description="Physical origin of the rows")
    support: int = Field(..., ge=1, description="Number of sites in the observation window")
    n_rows: int = Field(..., ge=0)
    dim: int = Field(..., ge=1)
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    metadata: Dict[str, Any] = Field(default_factory=dict, description="Parameters and seeds")
    annotations: Dict[str, List[Any]] = Field(default_factory=dict, description="Per-row observables")


def _stem(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_suffix("") if path.suffix in (".obs", ".meta", ".split") else path


def split(ds: Dataset, train_fraction: float = NETWORK_DEFAULTS["train_fraction"],
          seed: int = 0) -> Dataset:
    """Uniformly random disjoint train/test split, recorded on a copy of the dataset."""
    if not 0.0 < train_fraction < 1.0:
        raise ArgumentError(f"train fraction must lie in (0, 1), got {train_fraction}")
    n_train = int(round(train_fraction * ds.n_rows))
    if n_train == 0 or n_train == ds.n_rows:
        raise ArgumentError(
            f"fraction {train_fraction} of {ds.n_rows} rows leaves one side of the split empty"
        )
    order = np.random.default_rng(seed).permutation(ds.n_rows)
    metadata = dict(ds.metadata)
    metadata["split"] = {"train_fraction": train_fraction, "seed": seed}
    return Dataset(
        values=ds.values,
        support=ds.support,
        labels=list(ds.labels),
        source=ds.source,
        metadata=metadata,
        annotations=dict(ds.annotations),
        split=Split(train=np.sort(order[:n_train]), test=np.sort(order[n_train:])),
    )


def save(ds: Dataset, path: Union[str, Path]) -> Path:
    """Write ``.obs``, ``.meta`` and (if split) ``.split`` next to ``path``."""
    stem = _stem(path)
    lines = ["# " + ",".join(ds.labels)]
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in ds.values)
    atomic_write_text(stem.with_suffix(".obs"), "\n".join(lines) + "\n")

    meta = DatasetMeta(
        source=ds.source,
        support=ds.support,
        n_rows=ds.n_rows,
        dim=ds.dim,
        created_at=ds.metadata.get("created_at") or datetime.now(timezone.utc).isoformat(),
        metadata={k: v for k, v in ds.metadata.items() if k != "created_at"},
        annotations=ds.annotations,
    )
    atomic_write_text(stem.with_suffix(".meta"), meta.model_dump_json(indent=2))

    split_path = stem.with_suffix(".split")
    if ds.split is not None:
        text = (
            "train: " + ",".join(str(i) for i in ds.split.train) + "\n"
            + "test: " + ",".join(str(i) for i in ds.split.test) + "\n"
        )
        atomic_write_text(split_path, text)
    elif split_path.exists():
        split_path.unlink()
    logger.info("saved dataset %s (%d x %d)", stem, ds.n_rows, ds.dim)
    return stem


def _read_rows(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), f"cannot read file: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError(str(path), "missing '# label,...' header", row=0)
    labels = [s.strip() for s in lines[0][1:].split(",") if s.strip()]
    rows = []
    for row_no, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(labels):
            raise ParseError(
                str(path), f"expected {len(labels)} values, found {len(fields)}", row=row_no
            )
        values = []
        for col, field_text in enumerate(fields):
            try:
                values.append(float(field_text))
            except ValueError:
                raise ParseError(
                    str(path), f"not a number: {field_text!r}", row=row_no, column=col
                ) from None
        rows.append(values)
    return labels, rows


def _read_split(path: Path) -> Split:
    parts: Dict[str, List[int]] = {}
    for row_no, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        key, _, body = line.partition(":")
        if key.strip() not in ("train", "test"):
            raise ParseError(str(path), f"unknown section {key.strip()!r}", row=row_no)
        try:
            parts[key.strip()] = [int(s) for s in body.split(",") if s.strip()]
        except ValueError:
            raise ParseError(str(path), "indices must be integers", row=row_no) from None
    if set(parts) != {"train", "test"}:
        raise ParseError(str(path), "split file needs both train and test lines")
    return Split(train=parts["train"], test=parts["test"])


def load(path: Union[str, Path]) -> Dataset:
    """Read a dataset written by :func:`save`."""
    stem = _stem(path)
    obs_path, meta_path = stem.with_suffix(".obs"), stem.with_suffix(".meta")
    labels, rows = _read_rows(obs_path)

    try:
        meta = DatasetMeta.model_validate_json(meta_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(str(meta_path), f"cannot read file: {exc}") from exc
    except ValidationError as exc:
        raise ParseError(str(meta_path), f"invalid metadata: {exc.errors()[0]['msg']}") from exc

    if len(rows) != meta.n_rows:
        raise ParseError(str(obs_path), f"{len(rows)} rows but metadata declares {meta.n_rows}")
    values = np.array(rows, dtype=float).reshape(len(rows), len(labels))
    split_path = stem.with_suffix(".split")
    dataset_split = _read_split(split_path) if split_path.exists() else None

    metadata = dict(meta.metadata)
    metadata["created_at"] = meta.created_at
    try:
        return Dataset(
            values=values,
            support=meta.support,
            labels=labels,
            source=meta.source,
            metadata=metadata,
            annotations=meta.annotations,
            split=dataset_split,
        )
    except ArgumentError as exc:
        raise ParseError(str(stem), str(exc)) from exc
