#!/usr/bin/env python3
# The nonlocal obstacle problem solved by the primal-dual active set method.
#
# Find u >= psi with a(u, v - u) >= <f, v - u>; in the discrete saddle-point
# form the biorthogonal multiplier basis makes the constraint pairing
# diagonal, so the complementarity system
#
#     A u - B lambda = F,   u >= psi,  lambda >= 0,  lambda (u - psi) = 0
#
# is solved exactly in a handful of active-set iterations.  The multiplier
# is the contact-force density and obeys the pointwise dual bound
# lambda <= (-L psi - f)^+ up to discretization slack.

import numpy as np

from horizonfem import (KernelCase, SigmaMode, active_set_solve, build_space,
                        lewy_stampacchia_margin, make_kernel,
                        make_obstacle_problem, operator_set, smooth_obstacle)

space = build_space(0.0, 1.0, 256, 1.0)
kernel = make_kernel(KernelCase.FRACTIONAL, 0.5, 1.0, SigmaMode.CONSTANT, 1.0)
ops = operator_set(space, kernel)
problem = make_obstacle_problem(space, ops, 0.0, smooth_obstacle)

result = active_set_solve(problem)
x = space.free_coords
contact = x[result.active_set]

print("cells: %d, horizon: %g, s = %g" % (space.n_cells, space.delta, kernel.s))
print("active-set iterations: %d" % result.iterations)
print("contact zone: [%.4f, %.4f]  (%d nodes)"
      % (contact.min(), contact.max(), len(contact)))
print("max u = %.5f at x = %.4f" % (result.u.max(), x[np.argmax(result.u)]))
print("max multiplier density = %.4f" % result.lam.max())
print("KKT: stationarity %.2e, min lambda %.2e, min gap %.2e, complementarity %.2e"
      % (result.kkt.stationarity, result.kkt.min_lambda,
         result.kkt.min_gap, result.kkt.complementarity))
margin = lewy_stampacchia_margin(problem, result.lam)
print("dual bound margin min((-L psi - f)^+ - lambda) = %.3e" % margin.min())
