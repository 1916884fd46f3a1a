"""Spectral solver for the anisotropic fractional Poisson problem on the unit disk.

The unknown is written as (1 - r^2)^(alpha/2) times an expansion in the
weighted disk basis V_{l,mu}(x) P_n^{(alpha/2, l)}(2 r^2 - 1); the operator
-div (-Delta)^((alpha-2)/2) K grad then acts on coefficients through sparse
stencils and decouples into small tridiagonal systems.
"""

from .basis import (
    BasisIndex,
    CoefficientField,
    basis_norm_h,
    eval_basis_function,
    eval_expansion,
    eval_solid_harmonic,
    project,
    read_coefficients,
    write_coefficients,
)
from .errors import BasisIndexError, NotSPDError, ResolutionError, TruncationError
from .jacobi import diff_jacobi, eval_jacobi, jacobi_norm
from .operators import (
    OperatorParams,
    apply_forward,
    frac_laplacian_eigenvalue,
    grad_unweighted,
    grad_weighted,
    riesz_action,
    riesz_grad,
)
from .regularity import BesovIndices, besov_norm, decay_rhs, regularity_gain_report
from .spectral_solver import assemble_block, solve, solve_block

__version__ = "0.1.0"

__all__ = [
    "BasisIndex",
    "BasisIndexError",
    "BesovIndices",
    "CoefficientField",
    "NotSPDError",
    "OperatorParams",
    "ResolutionError",
    "TruncationError",
    "apply_forward",
    "assemble_block",
    "basis_norm_h",
    "besov_norm",
    "decay_rhs",
    "diff_jacobi",
    "eval_basis_function",
    "eval_expansion",
    "eval_jacobi",
    "eval_solid_harmonic",
    "frac_laplacian_eigenvalue",
    "grad_unweighted",
    "grad_weighted",
    "jacobi_norm",
    "project",
    "read_coefficients",
    "regularity_gain_report",
    "riesz_action",
    "riesz_grad",
    "solve",
    "solve_block",
    "write_coefficients",
]
