"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 2, NumericalError -> 3.
"""


class InputError(ValueError):
    """Bad user input: malformed files, invalid parameters, shape mismatches."""


class NumericalError(RuntimeError):
    """Numerical failure: degenerate data, failed selection or calibration."""
