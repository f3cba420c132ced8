"""p-generalized modified error functions by Picard iteration of integral operators."""

from .analysis import (
    BoundViolation,
    ConvergenceReport,
    closed_form_delta0,
    convergence_study,
    verify_lemma_bounds,
)
from .core import (
    Dirichlet,
    GridFunction,
    Neumann,
    ProblemSpec,
    QuadratureConfig,
    Robin,
    integral_0_to_inf,
    integral_0_to_x,
    kernel_f,
    psi,
)
from .operators import analytic_derivative, apply, apply_dirichlet, apply_neumann, apply_robin
from .physical import PhysicalParams, physical_to_gamma
from .solver import (
    NoConvergence,
    SolveResult,
    SolverConfig,
    ThresholdResult,
    ThresholdViolation,
    gap_chat,
    gap_dirichlet,
    gap_neumann,
    gap_robin,
    picard_solve,
    threshold,
)

__version__ = "0.1.0"
