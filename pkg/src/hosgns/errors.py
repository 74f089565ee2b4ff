"""Exception types shared across the package."""


class HosgnsError(Exception):
    """Base class for package errors."""


class ParseError(HosgnsError):
    """A contact line could not be parsed."""

    def __init__(self, line_number: int, line: str, reason: str):
        self.line_number = line_number
        self.line = line
        super().__init__(f"line {line_number}: {reason}: {line!r}")


class EmptyGraphError(HosgnsError):
    """No usable events were found in the input."""


class ResourceBudgetError(HosgnsError):
    """A computation would exceed the configured memory/size budget."""


class DivergenceError(HosgnsError):
    """Training produced a non-finite loss."""


class DegenerateSplitError(HosgnsError):
    """A train/test split left one side without instances."""


class InfeasibleError(HosgnsError):
    """Not enough candidates exist to satisfy a sampling request."""
