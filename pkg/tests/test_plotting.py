"""
Tests for result tables and SVG figure emission.
"""

import pytest
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import ArgumentError, AxisError, ParseError
from src.plotting.svg import emit_svg
from src.plotting.tables import Table, table_from_columns


def sweep_like_table() -> Table:
    return table_from_columns(
        {"latent_dim": [0, 1, 2, 3], "median_test_loss": [0.1, 1e-4, 8e-5, 9e-5]},
        {"seed": 7, "data": {"source": "gge"}},
    )


class TestTables:
    """Tests for delimiter-separated tables."""

    def test_round_trip(self, tmp_path):
        """Columns, values and provenance survive save and load."""
        table = sweep_like_table()
        path = table.save(tmp_path / "sweep.csv")
        back = Table.load(path)
        assert back.columns == table.columns
        assert back.rows == table.rows
        assert back.provenance == table.provenance

    def test_provenance_is_first_line(self, tmp_path):
        """The first line is a JSON comment."""
        path = sweep_like_table().save(tmp_path / "sweep.csv")
        first = path.read_text().splitlines()[0]
        assert first.startswith("# {")

    def test_ragged_row(self, tmp_path):
        """A row with the wrong cell count is a parse error."""
        path = tmp_path / "bad.csv"
        path.write_text("# {}\na,b\n1,2\n3\n")
        with pytest.raises(ParseError) as info:
            Table.load(path)
        assert info.value.row == 2

    def test_append_checks_width(self):
        """Appending too few cells is rejected."""
        with pytest.raises(ArgumentError):
            Table(columns=["a", "b"]).append(1)

    def test_unequal_columns(self):
        """Columns of different lengths cannot form a table."""
        with pytest.raises(ArgumentError):
            table_from_columns({"a": [1, 2], "b": [1]}, {})


class TestSvg:
    """Tests for static SVG output."""

    def test_two_point_line(self, tmp_path):
        """A two-row table gives a valid SVG document."""
        table = table_from_columns({"x": [0, 1], "y": [1.0, 2.0]}, {})
        info = emit_svg(table, "line", tmp_path / "line.svg", "x", "y")
        text = (tmp_path / "line.svg").read_text()
        assert "<svg" in text
        assert info["n_points"] == 2

    def test_identical_tables_give_identical_files(self, tmp_path):
        """Emission is byte-deterministic."""
        table = sweep_like_table()
        emit_svg(table, "line", tmp_path / "a.svg", "latent_dim", "median_test_loss", log_y=True)
        emit_svg(table, "line", tmp_path / "b.svg", "latent_dim", "median_test_loss", log_y=True)
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_provenance_embedded(self, tmp_path):
        """The provenance JSON is stored in the SVG metadata."""
        emit_svg(sweep_like_table(), "line", tmp_path / "p.svg", "latent_dim", "median_test_loss")
        assert "gge" in (tmp_path / "p.svg").read_text()

    def test_log_axis_rejects_zero(self, tmp_path):
        """A zero on a log axis names its row."""
        table = table_from_columns({"x": [1, 2, 3], "y": [1.0, 0.0, 2.0]}, {})
        with pytest.raises(AxisError) as info:
            emit_svg(table, "line", tmp_path / "bad.svg", "x", "y", log_y=True)
        assert info.value.row == 1
        assert not (tmp_path / "bad.svg").exists()

    def test_scatter_color_range(self, tmp_path):
        """The colour map spans the colour column."""
        table = table_from_columns({"x": [0.0, 1.0, 2.0], "y": [1.0, 0.0, 1.0],
                                    "energy": [-0.5, 0.1, 0.7]}, {})
        info = emit_svg(table, "scatter", tmp_path / "s.svg", "x", "y", color="energy")
        assert info["color_range"] == (-0.5, 0.7)

    def test_grouped_lines_and_heatmap(self, tmp_path):
        """Grouped curves and heatmaps are written."""
        table = table_from_columns(
            {"time": [0.1, 0.1, 1.0, 1.0], "latent_dim": [0, 1, 0, 1],
             "test_loss": [0.1, 0.01, 0.1, 0.05], "series": ["a", "a", "b", "b"]},
            {},
        )
        emit_svg(table, "line", tmp_path / "g.svg", "latent_dim", "test_loss", group="series")
        emit_svg(table, "heatmap", tmp_path / "h.svg", "time", "latent_dim",
                 color="test_loss", log_x=True)
        assert (tmp_path / "g.svg").exists() and (tmp_path / "h.svg").exists()

    def test_empty_table(self, tmp_path):
        """Nothing to plot is an argument error."""
        with pytest.raises(ArgumentError):
            emit_svg(Table(columns=["x", "y"]), "line", tmp_path / "e.svg", "x", "y")

    def test_unknown_kind(self, tmp_path):
        """Only line, scatter and heatmap plots exist."""
        with pytest.raises(ArgumentError):
            emit_svg(sweep_like_table(), "pie", tmp_path / "p.svg", "latent_dim", "median_test_loss")
