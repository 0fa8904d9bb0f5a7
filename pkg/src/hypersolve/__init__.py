"""hypersolve: exact hyperexponential solutions of integrable systems of
linear differential and difference equations over multivariate rational
function fields."""

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import (
    DegreeBoundExceeded,
    DivisionByZero,
    FactorizationIncomplete,
    HypersolveError,
    InconsistentSystem,
    InternalInconsistency,
    NotIntegrable,
    ParseError,
    SingularMatrix,
    UnsupportedDeltaStructure,
    UnsupportedSingularity,
)
from .ratfunc import (
    Factor,
    PartialFractions,
    Poly,
    RatFunc,
    VarContext,
    factor_univariate,
    format_poly,
    format_ratfunc,
    gcd_poly,
    partial_fractions,
)
from .delta import DeltaMap, DeltaSet, apply_map, constant_field
from .linalg import MatrixF
from .system import (
    Certificate,
    HyperexpGroup,
    IntegrableSystem,
    Representation,
    StructureMatrices,
    associated_system,
    display_certificate,
    iso_test,
    representation_equivalent,
    representation_from_json,
    representation_to_json,
    submodule_certificate,
    system_from_json,
    system_to_json,
    verify_group,
)
from .solver import (
    ExtensionCandidate,
    ReducedSystem,
    extend_certificate,
    solve_ordinary,
    solve_recursive,
    substitute_and_extract,
)

__version__ = "0.1.0"
