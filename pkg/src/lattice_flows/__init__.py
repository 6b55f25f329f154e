"""Integrable lattice flows and numerical certification of their algebra.

The package implements the Kac-van Moerbeke and Bogoyavlensky-Volterra
chains, the open and boundary-perturbed Toda lattices, their Lax pairs,
compatible Poisson structures, and the coordinate maps that intertwine the
flows, together with residual-based verification suites for every claimed
relation (Lax equations, conserved traces, Casimirs, Jacobi identities,
pencil compatibility, the Lenard ladder, and pushforward conjugacy).
"""

from .errors import (
    ChartMismatch,
    DimensionError,
    DivisionByZero,
    DomainError,
    DomainExit,
    LatticeError,
    NonIntegerMultiplicity,
    ParityError,
    StepFailure,
    UnsupportedDimension,
)
from .rootdata import (
    ConditionReport,
    DynkinTypeDiagram,
    Spectrum,
    build_diagram,
    gram_matrix,
    kozlov_treshchev_check,
    null_combination,
    sklyanin_spectrum,
    spectrum_from_json,
    spectrum_to_json,
)
from .states import State, ab_state, c_state, qp_state, u_state, v_state

__all__ = [name for name in dir() if not name.startswith("_")]
