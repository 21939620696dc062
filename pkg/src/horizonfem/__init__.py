"""Finite elements for finite-horizon nonlocal diffusion on an interval.

The package assembles and solves the linear volume-constrained problem and
the associated obstacle variational inequality for truncated fractional,
constant, and peridynamic-type kernels, and provides the convergence-study
harness used to validate the discretization.
"""

from .kernels import (INFINITE, KernelCase, KernelSpec, SigmaMode, c_ns,
                      kernel_value, make_kernel, radial_tail_integral,
                      truncation_constant)
from .grid import FeSpace1D, build_space, interpolate_nodal, prolong, DUAL_STENCIL
from .assembly import (OperatorSet, QuadOptions, ToeplitzMatrix,
                       assemble_dual_pairing, assemble_load, assemble_mass,
                       assemble_stiffness, assemble_stiffness_toeplitz,
                       collar_weight, infinite_horizon_matrix,
                       local_operator_set, nodal_operator_values, operator_set,
                       toeplitz_values)
from .linear import (LinearSolution, solve_fractional, solve_linear,
                     solve_local_reference)
from .obstacle import (KKTResiduals, ObstacleProblem, VIResult,
                       active_set_solve, kink_obstacle, kkt_residuals,
                       lewy_stampacchia_margin, make_obstacle_problem,
                       penalty_solve, smooth_obstacle)
from .analysis import (ConvergenceReport, ErrorPair, StudyConfig, StudyRow,
                       convergence_rates, error_vs_reference, local_gap_study,
                       run_study)

__version__ = "0.1.0"

__all__ = [
    "INFINITE", "KernelCase", "KernelSpec", "SigmaMode", "c_ns", "kernel_value",
    "make_kernel", "radial_tail_integral", "truncation_constant",
    "FeSpace1D", "build_space", "interpolate_nodal", "prolong", "DUAL_STENCIL",
    "OperatorSet", "QuadOptions", "ToeplitzMatrix", "assemble_dual_pairing",
    "assemble_load", "assemble_mass", "assemble_stiffness",
    "assemble_stiffness_toeplitz", "collar_weight", "infinite_horizon_matrix",
    "local_operator_set", "nodal_operator_values", "operator_set",
    "toeplitz_values",
    "LinearSolution", "solve_fractional", "solve_linear", "solve_local_reference",
    "KKTResiduals", "ObstacleProblem", "VIResult", "active_set_solve",
    "kink_obstacle", "kkt_residuals", "lewy_stampacchia_margin",
    "make_obstacle_problem", "penalty_solve", "smooth_obstacle",
    "ConvergenceReport", "ErrorPair", "StudyConfig", "StudyRow",
    "convergence_rates", "error_vs_reference", "local_gap_study", "run_study",
]
