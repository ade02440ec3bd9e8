"""Exception types shared across the package.

The split mirrors the CLI exit codes: validation problems (bad input data),
infeasible machine parameters (the request is well-formed but no unitary
exists), and numerical failures (a solver could not meet its contract).
"""

from __future__ import annotations


class CloneKitError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(CloneKitError, ValueError):
    """Malformed or out-of-range input data."""


class InfeasibleError(CloneKitError):
    """Machine parameters admit no unitary realization."""


class NumericalError(CloneKitError):
    """A numerical routine failed to meet its contract."""
