"""Delimiter-separated result tables with an embedded provenance header.

Layout::

    # {"run_config": {...}, "seed": 7}
    N_L,best_test_loss
    0,0.0123
    1,1.2e-07
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union
import json

import numpy as np

from src.errors import ArgumentError, ParseError
from src.utils.files import atomic_write_text


@dataclass
class Table:
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ArgumentError(f"table row {i} has {len(row)} cells for {len(self.columns)} columns")

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, *cells):
        if len(cells) != len(self.columns):
            raise ArgumentError(f"expected {len(self.columns)} cells, got {len(cells)}")
        self.rows.append(list(cells))

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise ArgumentError(f"table has no column {name!r}; columns: {self.columns}")
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows])

    def to_csv(self) -> str:
        lines = ["# " + json.dumps(self.provenance, sort_keys=True), ",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format(cell) for cell in row))
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        atomic_write_text(path, self.to_csv())
        return Path(path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Table":
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ParseError(str(path), f"cannot read table: {exc}") from exc
        provenance: Dict[str, Any] = {}
        if lines and lines[0].startswith("#"):
            try:
                provenance = json.loads(lines[0][1:].strip() or "{}")
            except json.JSONDecodeError as exc:
                raise ParseError(str(path), f"bad provenance header: {exc.msg}", row=0) from exc
            lines = lines[1:]
        if not lines:
            raise ParseError(str(path), "missing column header")
        columns = lines[0].split(",")
        rows = []
        for row_no, line in enumerate(lines[1:], start=1):
            if not line.strip():
                continue
            cells = line.split(",")
            if len(cells) != len(columns):
                raise ParseError(str(path), f"expected {len(columns)} cells, found {len(cells)}",
                                 row=row_no)
            rows.append([_parse(cell) for cell in cells])
        return cls(columns=columns, rows=rows, provenance=provenance)


def _format(cell: Any) -> str:
    if isinstance(cell, (float, np.floating)):
        return f"{float(cell):.17g}"
    return str(cell)


def _parse(cell: str) -> Any:
    for cast in (int, float):
        try:
            return cast(cell)
        except ValueError:
            continue
    return cell


def table_from_columns(columns: Dict[str, Sequence[Any]], provenance: Dict[str, Any]) -> Table:
    names = list(columns)
    lengths = {len(v) for v in columns.values()}
    if len(lengths) > 1:
        raise ArgumentError("table columns have different lengths")
    rows = [list(cells) for cells in zip(*columns.values())]
    return Table(columns=names, rows=rows, provenance=provenance)
