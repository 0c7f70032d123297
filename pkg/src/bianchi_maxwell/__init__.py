"""Vacuum Maxwell fields on Bianchi I-VII homogeneous spacetimes.

The field equations reduce to a first-order ODE system in the time u0.
The package integrates that system, evaluates a catalog of closed-form
solutions, and checks both against a finite-difference evaluation of the
full four-dimensional equations.
"""

from .catalog import CaseEvaluator, CatalogSample, SolutionCase, adjudicate_variants, evaluate_case, residual_reduced
from .errors import (BianchiMaxwellError, ConfigError, ConstraintViolation, DomainError, EvalError, NumericError,
                     ParseError)
from .expr import Expr, deriv_fd, evaluate, parse
from .geometry import FieldState, SpacetimePoint, SpatialMetricFn, maxwell_residual_full
from .groups import BianchiGroup, FramePoint, frame_at, structure_constants, verify_commutators
from .reduced import ReducedState, constraint_check, integrate_reduced, reduced_rhs
from .tensor import Mat3, Sym3, epsilon_pair, mat3_det, sym3_det, sym3_inverse

__version__ = "0.1.0"

__all__ = [
    "BianchiGroup", "BianchiMaxwellError", "CaseEvaluator", "CatalogSample", "ConfigError", "ConstraintViolation",
    "DomainError", "EvalError", "Expr", "FieldState", "FramePoint", "Mat3", "NumericError", "ParseError",
    "ReducedState", "SolutionCase", "SpacetimePoint", "SpatialMetricFn", "Sym3", "adjudicate_variants",
    "constraint_check", "deriv_fd", "epsilon_pair", "evaluate", "evaluate_case", "frame_at", "integrate_reduced",
    "mat3_det", "maxwell_residual_full", "parse", "reduced_rhs", "residual_reduced", "structure_constants",
    "sym3_det", "sym3_inverse", "verify_commutators",
]
