"""Exception types shared across the package."""


class InputDataError(ValueError):
    """Base class for problems with user-supplied data or parameters."""


class SchemaError(InputDataError):
    """A file does not match its documented column schema."""


class ParseError(InputDataError):
    """A file row could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnrecoverableGapError(InputDataError):
    """A missing value could not be filled from any neighbor series."""

    def __init__(self, field, hours):
        hours = list(hours)
        preview = ", ".join(str(h) for h in hours[:10])
        if len(hours) > 10:
            preview += ", ..."
        super().__init__(
            f"{field}: no neighbor has data at {len(hours)} hour(s): {preview}"
        )
        self.field = field
        self.hours = hours


class InfeasibleBaselineError(ValueError):
    """Baseline generator cannot cover the peak load on its own."""


class ConfigError(ValueError):
    """Run configuration is malformed or violates an invariant."""
