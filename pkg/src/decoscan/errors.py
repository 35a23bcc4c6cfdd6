"""Exception hierarchy.

Two families matter to the CLI exit codes: validation problems (bad inputs,
bad configuration) and numerical failures (singular evaluations, failed
matching or extrapolation).
"""

from __future__ import annotations


class DecoscanError(Exception):
    """Base class for all package errors."""


class DomainError(DecoscanError):
    """A physical or numerical precondition on an input was violated."""


class UnitError(DomainError):
    """Unknown or unsupported unit name."""


class ConfigError(DecoscanError):
    """Configuration file failed validation.

    ``failures`` collects every problem found, not just the first.
    """

    def __init__(self, failures):
        if isinstance(failures, str):
            failures = [failures]
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class GridError(DomainError):
    """Arrays that must share a field grid do not."""


class BracketError(DomainError):
    """A minimization bracket does not actually bracket a minimum."""


class MeasurementError(DomainError):
    """Measured inputs are mutually inconsistent."""


class SingularityError(DecoscanError):
    """Model evaluated inside the guard band of a resonance."""

    def __init__(self, field, state_label, resonance_index):
        self.field = field
        self.state_label = state_label
        self.resonance_index = resonance_index
        super().__init__(
            f"field {field!r} G is inside the guard band of resonance "
            f"{resonance_index} of state {state_label!r}"
        )


class NumericalError(DecoscanError):
    """A numerical procedure failed to produce a trustworthy result."""


class AccuracyError(NumericalError):
    """A result was produced but its error estimate exceeds tolerance."""
