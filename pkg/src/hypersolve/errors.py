"""Exception taxonomy for the solver stack.

Every error that can escape the public API derives from HypersolveError, so
callers (and the CLI) can map failures to exit codes without pattern matching
on message strings.
"""


class HypersolveError(Exception):
    """Base class for all package errors."""


class ParseError(HypersolveError):
    """Raised on malformed textual input (expressions or JSON schemas).

    Carries 1-based ``line``/``column`` when the failure has a source
    position; both are None for structural (schema-level) problems.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DivisionByZero(HypersolveError):
    """Division by the zero rational function."""


class FactorizationIncomplete(HypersolveError):
    """A required polynomial factorization is outside the supported scope.

    In practice: an analysis step needed a root of an irreducible factor of
    degree >= 2 (e.g. a non-linear singularity of a leading coefficient).
    """


class SingularMatrix(HypersolveError):
    """A matrix that must be invertible is singular."""


class InconsistentSystem(HypersolveError):
    """An inhomogeneous linear condition admits no solution."""


class NotIntegrable(HypersolveError):
    """The pairwise integrability conditions of a system fail.

    ``details`` lists (map_i, map_j, row, col, residual) witnesses for the
    first failing pair.
    """

    def __init__(self, message, details=None):
        self.details = details or []
        super().__init__(message)


class InternalInconsistency(HypersolveError):
    """An invariant the algorithms guarantee was violated; indicates a bug."""


class DegreeBoundExceeded(HypersolveError):
    """A configured degree/dispersion cap was hit before the search finished."""


class UnsupportedSingularity(HypersolveError):
    """A singularity type outside the committed scope (e.g. irregular at a
    finite point, or ramified behaviour at infinity)."""


class UnsupportedDeltaStructure(HypersolveError):
    """The set of maps is not in the supported class (constant-coefficient
    directional derivations and translations on non-parameter variables)."""
