"""Exception types shared by the nodal_atlas modules."""


class NodalAtlasError(Exception):
    """Base class for library errors."""


class DomainError(NodalAtlasError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PrecisionError(NodalAtlasError):
    """Requested working precision cannot deliver the promised accuracy."""


class OutOfRangeError(NodalAtlasError, ValueError):
    """Parameter outside the validated range of an approximation."""


class IncompleteSeedError(NodalAtlasError, KeyError):
    """A prime coefficient needed by the Hecke extension is missing."""

    def __init__(self, prime: int):
        super().__init__(f"missing lambda({prime}) in seed")
        self.prime = prime


class ArgumentError(NodalAtlasError, ValueError):
    """Invalid combination of arguments."""


class FormatError(NodalAtlasError, ValueError):
    """Malformed coefficient file or other input file."""


class ConsistencyError(NodalAtlasError):
    """A computed structure violates an invariant (usually under-resolution)."""


class ResourceError(NodalAtlasError):
    """A request exceeds the memory budget."""
