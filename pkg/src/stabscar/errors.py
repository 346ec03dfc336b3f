"""Exception types raised across the package."""


class StabscarError(Exception):
    """Base class for all package errors."""


class DimensionError(StabscarError, ValueError):
    """Operands act on different numbers of qubits."""


class ParameterError(StabscarError, ValueError):
    """A numeric or structural parameter is out of its legal range."""


class DomainError(StabscarError, ValueError):
    """An operand is outside the domain of an operation (e.g. non-Hermitian)."""


class ResourceLimitError(StabscarError, RuntimeError):
    """A dense representation would exceed the configured qubit cap."""


class InvalidGroupError(StabscarError, ValueError):
    """Generators do not form a valid stabilizer group."""


class SectorError(StabscarError, ValueError):
    """A Hamiltonian does not commute with the requested parity operators."""


class StatisticsError(StabscarError, ValueError):
    """Too few levels for level-spacing statistics."""
