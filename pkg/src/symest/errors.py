"""Exception hierarchy shared by all symest modules."""


class SymestError(Exception):
    """Base class for library errors."""


class InputError(SymestError, ValueError):
    """Unknown symbol, unknown state, malformed argument."""


class MachineError(InputError):
    """A machine definition violates the model invariants."""


class InconsistentDecomposition(InputError):
    """Two symbols share the full label tuple of a decomposition."""

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(
            message or f"decomposition does not separate symbols {witness[0]!r} and {witness[1]!r}"
        )


class NotChainDecomposable(SymestError):
    """Raised when a chain partition is requested for a machine without one.

    ``witness`` is a ``(symbol, target, (source1, source2))`` triple for a
    per-symbol backward-injectivity violation, or a list of chain
    violations for the I/S/- strategy.
    """

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"not chain-decomposable: {witness}")


class PreimageOverflow(SymestError):
    """Materializing a product trace set would exceed the cap."""


class ParseError(SymestError):
    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class EvaluationError(SymestError, ArithmeticError):
    pass


class AbstractionError(SymestError):
    pass


class GenerationError(SymestError):
    """Random generator could not satisfy its configuration."""


class NotIsMachine(InputError):
    """Symbol factoring or output map does not describe an I/S/- machine."""
