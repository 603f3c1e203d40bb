"""Exception hierarchy shared by all troplag modules.

The CLI maps these onto exit codes: InputError -> 2, NumericError -> 3,
verification failures -> 1.
"""


class TroplagError(Exception):
    pass


class InputError(TroplagError, ValueError):
    """Malformed or inconsistent input data."""


class DegeneracyError(InputError):
    """Input too degenerate for the requested construction."""


class DomainError(TroplagError, ValueError):
    """Evaluation requested outside the domain of definition."""


class ConfigurationError(TroplagError, ValueError):
    """A gluing schedule or run configuration violates its invariants."""


class NumericError(TroplagError, RuntimeError):
    """An iterative solver failed to converge; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
