#!/usr/bin/env python3
# Shrinking the horizon: the nonlocal obstacle problem approaches the
# classical one.
#
# With the local scaling sigma = (1-s)/delta^(2-2s) the second moment of the
# kernel is normalized so that -L -> -d^2/dx^2 as delta -> 0.  Both the
# solutions and the contact-force densities of the nonlocal problem then
# approach those of the local obstacle problem (solved here with the same
# active-set method on the (-1, 2, -1)/h stencil).  Shrinking s smooths the
# multiplier; shrinking delta sharpens it toward the local jumps.

import math

from horizonfem import (KernelCase, SigmaMode, active_set_solve, build_space,
                        local_operator_set, make_kernel, make_obstacle_problem,
                        operator_set, smooth_obstacle)

N = 256
F = -1.0
deltas = (0.25, 0.125, 0.0625)

space0 = build_space(0.0, 1.0, N, deltas[0])
local_ops = local_operator_set(space0)
local_problem = make_obstacle_problem(space0, local_ops, F, smooth_obstacle)
local = active_set_solve(local_problem, max_iter=2000)
M = local_ops.M
print("local obstacle solve: %d active-set iterations" % local.iterations)

print("%-8s %-12s %-10s" % ("delta", "L2 gap", "iterations"))
for delta in deltas:
    sp = build_space(0.0, 1.0, N, delta)
    kernel = make_kernel(KernelCase.FRACTIONAL, 0.5, sp.delta, SigmaMode.LOCAL_SCALING)
    ops = operator_set(sp, kernel)
    problem = make_obstacle_problem(sp, ops, F, smooth_obstacle)
    res = active_set_solve(problem, max_iter=2000)
    e = res.u - local.u
    gap = math.sqrt(e @ (M @ e))
    print("%-8g %-12.4e %-10d" % (delta, gap, res.iterations))
