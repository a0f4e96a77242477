"""Phase functions for scalar linear ODEs with large coefficients.

A nondegenerate equation y^(n) + q_{n-1} y^(n-1) + ... + q_0 y = 0 has a
basis exp(psi_1), ..., exp(psi_n) whose phases psi_j are slowly varying even
when the solutions oscillate or grow rapidly.  The global method builds the
psi_j by adaptive bisection with a Newton-Riccati solve per panel; the local
method solves once on a seed panel and propagates each branch with a stiff
spectral IVP solver.
"""
from .chebkit import ChebExpansion, PiecewiseCheb, cheb_nodes, diff_matrix
from .coefficients import CoefficientField
from .equations import get_equation, registry
from .errors import (ConditioningError, ConvergenceError, DomainError, InvalidArgumentError,
                     PhasekitError, PropagationError, RefinementError, SeedError,
                     SingularSystemError, StiffnessError, TurningPointError)
from .levin_core import levin_interval
from .levin_global import GlobalConfig, global_levin
from .levin_local import LocalConfig, local_levin
from .phase_basis import Condition, ConditionSet, eval_solution, solve_with_conditions
from .phaseset import PhaseSet, coefficient_count, max_jump, riccati_residual
from .reference import reference_solution
from .riccati import riccati_form
from .spectral_ode import IvpSpec, solve_ivp

__all__ = [
    "ChebExpansion", "PiecewiseCheb", "cheb_nodes", "diff_matrix",
    "CoefficientField", "get_equation", "registry",
    "PhasekitError", "InvalidArgumentError", "DomainError", "ConvergenceError",
    "SingularSystemError", "TurningPointError", "RefinementError", "StiffnessError",
    "SeedError", "PropagationError", "ConditioningError",
    "levin_interval", "GlobalConfig", "global_levin", "LocalConfig", "local_levin",
    "Condition", "ConditionSet", "eval_solution", "solve_with_conditions",
    "PhaseSet", "coefficient_count", "max_jump", "riccati_residual",
    "reference_solution", "riccati_form", "IvpSpec", "solve_ivp",
]
