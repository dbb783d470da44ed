"""Exception hierarchy shared by every module."""


class CpdError(Exception):
    """Base class for all domain errors raised by :mod:`cpdshift`."""


class InvalidMeasureError(CpdError, ValueError):
    """A measure violates a structural requirement (negative weight, atom at 1)."""


class DomainError(CpdError, ValueError):
    """An input lies outside the domain of an operation."""


class NotCPDError(DomainError):
    """The requested object is not conditionally positive definite."""


class PositivityError(DomainError):
    """A sequence that must be strictly positive is not.

    The index of the first offending term is kept in :attr:`index`.
    """

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"term {index} is not positive (value {value!r})")


class WindowError(DomainError):
    """A Hankel window does not fit inside the available horizon."""
