"""Exception types shared across the package.

The CLI maps these onto exit codes: UsageError -> 2, DataError -> 3.
"""


class UsageError(ValueError):
    """Bad parameters, flags, or configuration (caller mistake)."""


class DataError(ValueError):
    """Bad input data: non-numeric values, support violations, etc."""


class NotInConditionClass(ValueError):
    """Neither direction of a tail-ordering condition holds on the grid."""
