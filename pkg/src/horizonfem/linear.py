"""Direct and iterative solvers for the discrete linear problems."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .assembly import (DEFAULT_QUAD, QuadOptions, StiffnessLike, ToeplitzMatrix,
                       assemble_load, infinite_horizon_matrix)
from .grid import FeSpace1D
from .kernels import KernelCase, SigmaMode, make_kernel

# direct factorization up to this many unknowns, conjugate gradients beyond
DENSE_SOLVE_LIMIT = 6000
CG_RTOL = 1e-12


@dataclass
class LinearSolution:
    u: np.ndarray
    residual_norm: float
    factorization_info: str


def solve_linear(A: StiffnessLike, b: np.ndarray) -> LinearSolution:
    """Solve A u = b for symmetric positive definite A.

    Dense matrices (and small Toeplitz ones) go through a Cholesky
    factorization; large Toeplitz operators use conjugate gradients with the
    fast Toeplitz matvec.  The returned residual is checked against the
    1e-10 * ||b|| contract.
    """
    b = np.asarray(b, dtype=float)
    if isinstance(A, ToeplitzMatrix) and A.n > DENSE_SOLVE_LIMIT:
        op = scipy.sparse.linalg.LinearOperator((A.n, A.n), matvec=A.matvec)
        u, info = scipy.sparse.linalg.cg(op, b, rtol=CG_RTOL, atol=0.0, maxiter=20 * A.n)
        if info != 0:
            raise RuntimeError("conjugate gradients failed to converge (info=%d)" % info)
        fact = "cg"
        residual = float(np.linalg.norm(A.matvec(u) - b))
    else:
        Ad = A.to_dense() if isinstance(A, ToeplitzMatrix) else A
        try:
            c, low = scipy.linalg.cho_factor(Ad, check_finite=False)
        except scipy.linalg.LinAlgError as err:
            raise RuntimeError("stiffness matrix is not positive definite; "
                               "this indicates an assembly bug") from err
        u = scipy.linalg.cho_solve((c, low), b, check_finite=False)
        fact = "cholesky"
        residual = float(np.linalg.norm(Ad @ u - b))
    bnorm = float(np.linalg.norm(b))
    if residual > 1e-10 * max(bnorm, 1e-300):
        raise RuntimeError("linear solve residual %.3e exceeds contract (1e-10 * ||b||)" % residual)
    # diagnostic only: no discrete maximum principle is guaranteed for these
    # operators, so a sign violation is reported, never raised
    if bnorm > 0.0 and np.all(b >= 0.0) and float(np.min(u)) < -1e-10:
        warnings.warn("nonnegative load produced min(u) = %.3e" % float(np.min(u)),
                      RuntimeWarning, stacklevel=2)
    return LinearSolution(u=u, residual_norm=residual, factorization_info=fact)


def solve_local_reference(space: FeSpace1D, f) -> np.ndarray:
    """P1 solution of the classical problem -u'' = f with zero boundary values."""
    n, h = space.n_free, space.h
    ab = np.empty((2, n))
    ab[0, :] = -1.0 / h
    ab[1, :] = 2.0 / h
    b = assemble_load(space, f)
    return scipy.linalg.solveh_banded(ab, b, lower=False)


def solve_fractional(space: FeSpace1D, s: float, f,
                     quad: QuadOptions = DEFAULT_QUAD,
                     toeplitz: bool = False) -> np.ndarray:
    """Discrete solution of the fractional Laplacian problem (-Delta)^s u = f.

    Uses the truncation identity on the collar of `space` (which must be at
    least as wide as the domain), with the fractional normalization so the
    infinite-horizon operator is exactly (-Delta)^s.
    """
    kernel_inf = make_kernel(KernelCase.FRACTIONAL, s, math.inf,
                             SigmaMode.FRACTIONAL_NORMALIZATION, n=1)
    A = infinite_horizon_matrix(space, kernel_inf, quad=quad, toeplitz=toeplitz)
    b = assemble_load(space, f)
    return solve_linear(A, b).u
