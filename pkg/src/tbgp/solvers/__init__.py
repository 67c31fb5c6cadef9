"""Analysis algorithms driven by seed/extract products."""

from .bifurcation import (
    BorderedSystemError,
    FoldPoint,
    FoldSystem,
    bordered_vectors,
    turning_point_continuation,
    turning_point_solve,
)
from .continuation import (
    ContinuationOptions,
    ContinuationPoint,
    ContinuationResult,
    arclength_continuation,
    arclength_core,
    tangent_at,
)
from .cost import cost_ratio, jacobian_cost, residual_cost
from .newton import NewtonError, NewtonOptions, NewtonResult, as_assembler, newton_core, newton_solve
from .sensitivity import SensitivityResult, adjoint_sensitivity, forward_sensitivity
from .stability import is_stable, min_abs_eigenvalue, stability_eigenvalues
from .transient import BDF_COEFFS, Trajectory, bdf_integrate, consistent_rate, observed_order
from .uq import (
    RNG_ALGORITHM,
    NodeSolveError,
    SgSolution,
    SurrogateSamples,
    UniformParameter,
    histogram,
    nisp_project,
    parameters_at,
    sample_surrogate,
    sg_block_jacobian,
    sg_newton_solve,
    sg_parameter_coeffs,
)

__all__ = [
    "BDF_COEFFS",
    "BorderedSystemError",
    "ContinuationOptions",
    "ContinuationPoint",
    "ContinuationResult",
    "FoldPoint",
    "FoldSystem",
    "NewtonError",
    "NewtonOptions",
    "NewtonResult",
    "NodeSolveError",
    "RNG_ALGORITHM",
    "SensitivityResult",
    "SgSolution",
    "SurrogateSamples",
    "Trajectory",
    "UniformParameter",
    "adjoint_sensitivity",
    "arclength_continuation",
    "arclength_core",
    "as_assembler",
    "bdf_integrate",
    "bordered_vectors",
    "consistent_rate",
    "cost_ratio",
    "forward_sensitivity",
    "histogram",
    "is_stable",
    "jacobian_cost",
    "min_abs_eigenvalue",
    "newton_core",
    "newton_solve",
    "nisp_project",
    "observed_order",
    "parameters_at",
    "residual_cost",
    "sample_surrogate",
    "sg_block_jacobian",
    "sg_newton_solve",
    "sg_parameter_coeffs",
    "stability_eigenvalues",
    "tangent_at",
    "turning_point_continuation",
    "turning_point_solve",
]
