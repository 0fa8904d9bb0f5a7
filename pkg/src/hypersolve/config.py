"""Solver configuration record.

One small immutable record is threaded through every search that could in
principle run unbounded; the CLI surfaces the same knobs as flags.  Hitting a
cap raises DegreeBoundExceeded — caps never silently truncate an answer.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    """Caps and preferences for the solver stack.

    max_degree      degree cap for polynomial ansatz solves (numerators of
                    rational solutions, auxiliary polynomial factors).
    max_dispersion  cap on the integer shift-distance searched when comparing
                    factor orbits under a shift map.
    max_poly_part   degree cap for the polynomial part of a derivation
                    certificate (exponential-solution search at infinity).
    pivot           1-based preferred pivot coordinate when cyclic-vector style
                    scalar equations are extracted from a first-order system.
    """

    max_degree: int = 30
    max_dispersion: int = 100
    max_poly_part: int = 10
    pivot: int = 1

    def __post_init__(self):
        if self.max_degree <= 0 or self.max_dispersion <= 0 or self.max_poly_part <= 0:
            raise ValueError("configuration caps must be positive")
        if self.pivot <= 0:
            raise ValueError("pivot is 1-based and must be positive")


DEFAULT_CONFIG = SolverConfig()
