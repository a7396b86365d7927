"""Exception hierarchy for the local-complexity toolkit.

Every error carries the process exit code the CLI reports for it:
1 for usage problems (bad arguments, unreadable inputs, failed
preconditions) and 2 for numerical failures.
"""

from typing import Iterable, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


# ---------------------------------------------------------------------------
# Usage errors (exit code 1)
# ---------------------------------------------------------------------------

class ArgumentError(ToolkitError, ValueError):
    """An argument is outside its documented range."""

    exit_code = 1


class ResourceError(ArgumentError):
    """A requested size exceeds the dense-memory limits."""


class PreconditionError(ToolkitError):
    """A pipeline stage was called without its required evidence."""

    exit_code = 1


class AxisError(ArgumentError):
    """A value cannot be placed on a logarithmic axis."""

    def __init__(self, axis: str, row: int, value: float):
        super().__init__(
            f"log-scale {axis} axis cannot show value {value!r} (row {row})"
        )
        self.axis = axis
        self.row = row
        self.value = value


class ParseError(ToolkitError):
    """A dataset or table file could not be parsed."""

    exit_code = 1

    def __init__(self, path: str, message: str, row: Optional[int] = None,
                 column: Optional[int] = None):
        location = path
        if row is not None:
            location += f", row {row}"
        if column is not None:
            location += f", column {column}"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.row = row
        self.column = column


# ---------------------------------------------------------------------------
# Numerical errors (exit code 2)
# ---------------------------------------------------------------------------

class NumericalError(ToolkitError):
    """Base class for failures of a numerical routine."""


class InternalError(NumericalError):
    """An internal consistency check failed (e.g. a non-Hermitian generator)."""


class DegeneracyError(NumericalError):
    """The Liouvillian has more than one (near-)zero mode."""


class ConvergenceError(NumericalError):
    """An iterative solver did not reach its tolerance."""


class IllPosedError(NumericalError):
    """A linear system is too ill-conditioned to solve reliably."""


class TrainingError(NumericalError):
    """Training diverged to a non-finite loss."""

    def __init__(self, step: int, loss: float):
        super().__init__(f"training diverged at step {step} (loss={loss!r})")
        self.step = step
        self.loss = loss


class DegenerateDataError(NumericalError):
    """Point cloud contains coincident points."""

    def __init__(self, indices: Iterable[int]):
        self.indices = sorted(int(i) for i in indices)
        shown = ", ".join(str(i) for i in self.indices[:20])
        more = "" if len(self.indices) <= 20 else f" (+{len(self.indices) - 20} more)"
        super().__init__(f"duplicate points at indices {shown}{more}")


class ReconstructionFailure(NumericalError):
    """Too few rows produced a converged Hamiltonian reconstruction."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateWarning(UserWarning):
    """Data is degenerate enough to make a statistic unreliable."""
