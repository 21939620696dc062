#!/usr/bin/env python3
# Penalty approximation of the obstacle problem.
#
# The constraint u >= psi is replaced by the bounded non-increasing ramp
# H_eps (1 below the obstacle, 0 beyond eps above it):
#
#     A u = B (-L psi - f)^+ H_eps(u - psi) + F,
#
# solved by semismooth Newton.  As eps shrinks, u_eps marches onto the
# active-set solution at rate O(eps), and the penalty multiplier
# lambda_eps = (-L psi - f)^+ H_eps(u_eps - psi) never exceeds its dual
# bound, by construction.

import math

from horizonfem import (KernelCase, SigmaMode, active_set_solve, build_space,
                        lewy_stampacchia_margin, make_kernel,
                        make_obstacle_problem, operator_set, smooth_obstacle)

space = build_space(0.0, 1.0, 128, 1.0)
kernel = make_kernel(KernelCase.FRACTIONAL, 0.5, 1.0, SigmaMode.CONSTANT, 1.0)
ops = operator_set(space, kernel)
problem = make_obstacle_problem(space, ops, 0.0, smooth_obstacle)

exact = active_set_solve(problem)
A = problem.a_dense

print("%-10s %-14s %-14s %-14s" % ("eps", "energy gap", "L2 gap", "min dual margin"))
from horizonfem import penalty_solve  # noqa: E402  (keep the narrative order)
for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
    u_eps, lam_eps = penalty_solve(problem, eps)
    e = u_eps - exact.u
    energy = math.sqrt(e @ (A @ e))
    l2 = math.sqrt(e @ (ops.M @ e))
    margin = lewy_stampacchia_margin(problem, lam_eps).min()
    print("%-10.0e %-14.3e %-14.3e %-14.3e" % (eps, energy, l2, margin))
