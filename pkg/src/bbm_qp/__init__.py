"""Solvers and verification tools for the BBM equation on the quarter plane.

``u_t + α u_x + β u u_x - γ u_xxt = f`` for ``x, t ≥ 0`` with initial data
``u0`` and boundary data ``g``.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    AccuracyError, BBMError, ConfigurationError, PicardDivergenceError, RangeError,
    StabilityError, UnsupportedConfigurationError,
)
from .problem import (
    ForcingDescriptor, FunctionDescriptor, Grid, ProblemSpec, eval_function, validate,
)
from .quadrature import QuadratureConfig, tail_bound_M
from .kernels import gamma_convolve, kernel_K, phi, phi_field
from .semianalytic import SolutionField, solve_field, solve_u, transport_solution
from .reference import FdConfig, PicardConfig, fd_solve, integral_equation_solve, picard_residual
from .asymptotics import DecayFit, decay_fit, extract_local_data, olver_leading_term
from .periodicity import defect_direct, defect_representation, periodicity_study

__all__ = [
    "AccuracyError", "BBMError", "ConfigurationError", "PicardDivergenceError", "RangeError",
    "StabilityError", "UnsupportedConfigurationError", "ForcingDescriptor", "FunctionDescriptor",
    "Grid", "ProblemSpec", "eval_function", "validate", "QuadratureConfig", "tail_bound_M",
    "gamma_convolve", "kernel_K", "phi", "phi_field", "SolutionField", "solve_field", "solve_u",
    "transport_solution", "FdConfig", "PicardConfig", "fd_solve", "integral_equation_solve",
    "picard_residual", "DecayFit", "decay_fit", "extract_local_data", "olver_leading_term",
    "defect_direct", "defect_representation", "periodicity_study",
]
