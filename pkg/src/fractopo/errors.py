"""Exception hierarchy.

The CLI maps these onto exit codes: ``InputError`` (and its ``DomainError``
subclass) to 2, ``CapacityError`` to 3, ``PreconditionError`` to 1.
"""


class FractopoError(Exception):
    pass


class InputError(FractopoError, ValueError):
    """Malformed or out-of-range input."""


class DomainError(InputError):
    """An evaluation point or integration window leaves the generator domain."""


class CapacityError(FractopoError):
    """A brute-force bound was exceeded."""


class PreconditionError(FractopoError):
    """A mathematical precondition does not hold (e.g. the family is not fractal)."""
