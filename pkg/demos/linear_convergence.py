#!/usr/bin/env python3
# Mesh-refinement study for the linear volume-constrained problem
#
#     a(u, v) = <f, v>  on Omega = (0,1),   u = 0 on the delta-collar,
#
# with the truncated fractional-type kernel gamma = |x-y|^(-1-2s) on
# |x-y| <= delta.  Errors are measured against a fine surrogate solution
# assembled through the first-row (Toeplitz) fast path.  The energy error
# decays like h^(1/2) and the L2 error like h, reflecting the limited
# boundary regularity of the solution (u behaves like dist^s near the
# volume constraint no matter how smooth f is).

from horizonfem import SigmaMode, StudyConfig, run_study

config = StudyConfig(
    kind="h", problem="linear",
    s=0.5, delta=0.5,
    sigma_mode=SigmaMode.CONSTANT, sigma_value=1.0,
    f=1.0,
    levels=(3, 4, 5, 6),   # h = 1/8 ... 1/64
    ref_level=9,           # surrogate on h = 1/512
)

report = run_study(config)

print("linear problem, s=%.2f, delta=%.2f, f=%g" % (config.s, config.delta, config.f))
print("%-10s %-12s %-8s %-12s %-8s" % ("h", "energy err", "rate", "L2 err", "rate"))
for row in report.rows:
    print("%-10g %-12.3e %-8s %-12.3e %-8s"
          % (row.param, row.energy_error,
             "-" if row.energy_rate is None else "%.3f" % row.energy_rate,
             row.l2_error,
             "-" if row.l2_rate is None else "%.3f" % row.l2_rate))
