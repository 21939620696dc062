"""Obstacle problem solvers: primal-dual active set and penalty iteration.

The discrete saddle-point problem couples the stiffness matrix with the
diagonal dual pairing B of the biorthogonal multiplier basis:

    A u - B alpha = F,   u >= psi,  alpha >= 0,  alpha * (u - psi) = 0

componentwise over the free nodes.  Because B is diagonal, the multiplier
coefficients alpha are nodal values of the contact force density and the
complementarity system is solved exactly by the active-set iteration.
The penalty route replaces the constraint with the bounded non-increasing
ramp H_eps and solves the resulting semilinear system by semismooth Newton;
its multiplier g_plus * H_eps(u - psi) obeys the dual bound
lambda <= (-L psi - f)^+ by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .assembly import OperatorSet, assemble_load, nodal_operator_values
from .grid import FeSpace1D, interpolate_nodal


def smooth_obstacle(x):
    """Parabolic cap: max(-3(x-1/2)^2 + 1/4, 0); vanishes near the boundary."""
    x = np.asarray(x, dtype=float)
    return np.maximum(-3.0 * (x - 0.5) ** 2 + 0.25, 0.0)


def kink_obstacle(x):
    """Piecewise obstacle with a plateau and a tent, zero elsewhere:
    0.02 on [1/6, 1/3], 0.24(x - 2/3) on [2/3, 3/4], 0.24(5/6 - x) on [3/4, 5/6]."""
    x = np.asarray(x, dtype=float)
    return np.select(
        [(x >= 1.0 / 6.0) & (x <= 2.0 / 6.0),
         (x >= 2.0 / 3.0) & (x <= 3.0 / 4.0),
         (x > 3.0 / 4.0) & (x <= 5.0 / 6.0)],
        [np.full_like(x, 0.02), 0.24 * (x - 2.0 / 3.0), 0.24 * (5.0 / 6.0 - x)],
        default=0.0)


def ramp(t, eps: float):
    """The penalty profile H_eps: 1 for t <= 0, 1 - t/eps on [0, eps], 0 beyond."""
    return np.clip(1.0 - np.asarray(t, dtype=float) / eps, 0.0, 1.0)


@dataclass
class ObstacleProblem:
    """Discrete data of one obstacle instance over the free nodes."""
    space: FeSpace1D
    operators: OperatorSet
    f_vec: np.ndarray      # load vector <f, phi_p>
    psi_vec: np.ndarray    # nodal obstacle interpolant
    g_plus_vec: np.ndarray  # nodal (-L psi - f)^+ via the lumped operator

    @property
    def a_dense(self) -> np.ndarray:
        return self.operators.a_dense()


@dataclass
class KKTResiduals:
    stationarity: float
    min_lambda: float
    min_gap: float
    complementarity: float

    def within(self, tol: float = 1e-10) -> bool:
        return (self.stationarity <= tol and self.min_lambda >= -1e-12
                and self.min_gap >= -1e-12 and abs(self.complementarity) <= tol)


@dataclass
class VIResult:
    u: np.ndarray
    lam: np.ndarray          # multiplier coefficients (nodal density)
    active_set: np.ndarray   # indices where u = psi
    iterations: int
    kkt: KKTResiduals


def make_obstacle_problem(space: FeSpace1D, operators: OperatorSet, f, psi) -> ObstacleProblem:
    """Bundle load, obstacle interpolant and the nodal (-L psi - f)^+ data."""
    f_vec = assemble_load(space, f)
    psi_vec = interpolate_nodal(space, psi) if callable(psi) \
        else np.full(space.n_free, float(psi))
    lpsi = nodal_operator_values(space, operators.A, psi_vec)
    g_plus = np.maximum(lpsi - f_vec / operators.B, 0.0)
    return ObstacleProblem(space=space, operators=operators, f_vec=f_vec,
                           psi_vec=psi_vec, g_plus_vec=g_plus)


def kkt_residuals(problem: ObstacleProblem, u: np.ndarray, lam: np.ndarray) -> KKTResiduals:
    """Stationarity, primal/dual feasibility and complementarity residuals."""
    B = problem.operators.B
    r = problem.operators.a_matvec(u) - B * lam - problem.f_vec
    gap = u - problem.psi_vec
    return KKTResiduals(stationarity=float(np.linalg.norm(r)),
                        min_lambda=float(np.min(lam, initial=np.inf)),
                        min_gap=float(np.min(gap, initial=np.inf)),
                        complementarity=float(abs(np.sum(lam * B * gap))))


def active_set_solve(problem: ObstacleProblem, c_param: float = 1.0,
                     tol: float = 1e-10, max_iter: int = 50) -> VIResult:
    """Primal-dual active set iteration on the nodal complementarity system.

    Active set prediction: A = {p : lambda_p + c (psi_p - u_p) > 0}; on it
    u = psi, off it lambda = 0, and the reduced SPD system determines the
    remaining unknowns.  Terminates when the active set repeats.
    """
    if c_param <= 0.0:
        raise ValueError("c_param must be positive")
    A = problem.a_dense
    n = len(problem.f_vec)
    B = problem.operators.B
    u = _solve_spd(A, problem.f_vec)
    lam = np.zeros(n)
    active = problem.psi_vec - u > 0.0  # seed from constraint violations
    for it in range(1, max_iter + 1):
        u, lam = _active_set_step(A, B, problem.f_vec, problem.psi_vec, active)
        new_active = lam + c_param * (problem.psi_vec - u) > 0.0
        if np.array_equal(new_active, active):
            kkt = kkt_residuals(problem, u, lam)
            if kkt.within(tol):
                return VIResult(u=u, lam=lam, active_set=np.nonzero(active)[0],
                                iterations=it, kkt=kkt)
        active = new_active
    raise RuntimeError("active-set iteration did not converge in %d steps "
                       "(last active sizes %d)" % (max_iter, int(np.sum(active))))


def _solve_spd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, check_finite=False),
                                      b, check_finite=False)
    except scipy.linalg.LinAlgError as err:
        raise RuntimeError("singular reduced system; indicates an assembly bug") from err


def _active_set_step(A, B, f, psi, active):
    inactive = ~active
    n = len(f)
    u = np.empty(n)
    lam = np.zeros(n)
    u[active] = psi[active]
    if np.any(inactive):
        rhs = f[inactive] - A[np.ix_(inactive, active)] @ psi[active]
        u[inactive] = _solve_spd(A[np.ix_(inactive, inactive)], rhs)
    if np.any(active):
        lam[active] = (A[active, :] @ u - f[active]) / B[active]
    return u, lam


def penalty_solve(problem: ObstacleProblem, epsilon: float,
                  tol: float = 1e-12, max_iter: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Semismooth Newton for A u = B (g_plus H_eps(u - psi)) + F.

    The generalized derivative of H_eps is -1/eps on (0, eps) and 0
    elsewhere, so every Newton matrix is A plus a nonnegative diagonal.
    Full steps with residual backtracking (halving, at most 20 times).
    Returns (u_eps, lambda_eps) with lambda_eps = g_plus H_eps(u_eps - psi).
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    A = problem.a_dense
    B, g_plus, psi, F = (problem.operators.B, problem.g_plus_vec,
                         problem.psi_vec, problem.f_vec)

    def residual(u):
        return A @ u - B * g_plus * ramp(u - psi, epsilon) - F

    # feasible warm start; at gap = 0 the -1/eps branch of the generalized
    # derivative is used, which keeps the first steps PDAS-like instead of
    # overshooting from a fully-violated iterate
    u = np.maximum(_solve_spd(A, F), psi)
    r = residual(u)
    rnorm = np.linalg.norm(r)
    fscale = max(np.linalg.norm(F), float(np.linalg.norm(B * g_plus)), 1e-300)
    stall = 0
    for _ in range(max_iter):
        if rnorm <= tol * fscale:
            break
        gap = u - psi
        dslope = np.where((gap >= 0.0) & (gap < epsilon), B * g_plus / epsilon, 0.0)
        J = A + np.diag(dslope)
        step = _solve_spd(J, -r)
        t = 1.0
        for _ in range(20):
            r_new = residual(u + t * step)
            if np.linalg.norm(r_new) < rnorm:
                break
            t *= 0.5
        else:
            # no decrease possible: either we sit at the numerical floor of
            # the (1/eps)-conditioned system, or the iteration truly stalled
            if rnorm <= 1e-8 * fscale:
                break
            raise RuntimeError("penalty Newton stalled while backtracking; "
                               "try a smaller epsilon continuation")
        u = u + t * step
        r = r_new
        new_norm = np.linalg.norm(r_new)
        stall = stall + 1 if new_norm >= 0.99 * rnorm else 0
        if stall >= 10:
            if new_norm <= 1e-8 * fscale:
                break
            raise RuntimeError("penalty Newton stagnating (10 steps without progress); "
                               "try a smaller epsilon continuation")
        rnorm = new_norm
    else:
        raise RuntimeError("penalty Newton did not converge in %d iterations" % max_iter)
    return u, g_plus * ramp(u - psi, epsilon)


def lewy_stampacchia_margin(problem: ObstacleProblem, lam: np.ndarray) -> np.ndarray:
    """Componentwise slack (-L psi - f)^+ - lambda of the dual bound."""
    return problem.g_plus_vec - lam
