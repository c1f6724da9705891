"""Exception hierarchy shared by every hyperflow layer."""

from typing import Any, Optional, Tuple


class HyperflowError(ValueError):
    """Root of all library errors."""


class DistributionError(HyperflowError):
    """A distribution could not be formed (empty support, weight > 1, ...)."""


class MeasureError(HyperflowError):
    """A leakage measure was asked of a partial distribution or hyper."""


class RefinementError(HyperflowError):
    """Refinement inputs are incompatible or a witness does not validate."""


class ParseError(HyperflowError):
    """Program text is malformed or does not resolve against its declarations."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{location}{message}")


class EvaluationError(HyperflowError):
    """An expression failed at run time; carries the offending state."""

    def __init__(
        self,
        message: str,
        visible: Optional[Tuple[Any, ...]] = None,
        hidden: Optional[Tuple[Any, ...]] = None,
    ):
        self.message = message
        self.visible = visible
        self.hidden = hidden
        if visible is None and hidden is None:
            super().__init__(message)
        else:
            super().__init__(f"{message} (at visible={visible!r}, hidden={hidden!r})")
