"""Error norms against fine-mesh surrogates and convergence-study drivers.

A study runs the full pipeline (mesh, assemble, solve, error, rate) over a
sequence of refinement levels, horizons, or fractional orders, measuring
errors in the energy norm sqrt(e' A e) and the L2 norm sqrt(e' M e) of the
reference mesh.  Rates between consecutive rows are log2 ratios (mesh size
halves, or the horizon doubles, from row to row).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import (DEFAULT_QUAD, OperatorSet, QuadOptions, StiffnessLike,
                       assemble_mass, assemble_load, infinite_horizon_matrix,
                       local_operator_set, operator_set)
from .grid import FeSpace1D, build_space, prolong
from .kernels import KernelCase, KernelSpec, SigmaMode, make_kernel
from .linear import solve_linear
from .obstacle import (active_set_solve, kink_obstacle,
                       make_obstacle_problem, smooth_obstacle)


@dataclass(frozen=True)
class ErrorPair:
    energy: float
    l2: float


def _apply(A: StiffnessLike, x: np.ndarray) -> np.ndarray:
    return A.matvec(x) if hasattr(A, "matvec") else A @ x


def energy_norm(A: StiffnessLike, e: np.ndarray) -> float:
    q = float(e @ _apply(A, e))
    return math.sqrt(max(q, 0.0))


def error_vs_reference(space_c: FeSpace1D, u_c: np.ndarray,
                       space_f: FeSpace1D, u_f: np.ndarray,
                       A_f: StiffnessLike, M_f) -> ErrorPair:
    """Energy/L2 errors of a coarse solution against a fine surrogate."""
    e = prolong(space_c, space_f, u_c) - u_f
    return ErrorPair(energy=energy_norm(A_f, e), l2=math.sqrt(max(float(e @ (M_f @ e)), 0.0)))


def convergence_rates(errors, direction: str = "h") -> list[float]:
    """rate_i = log2(e_i / e_{i+1}) for halving h (or doubling delta)."""
    if direction not in ("h", "delta", "s"):
        raise ValueError("unknown study direction %r" % direction)
    errors = [float(e) for e in errors]
    if len(errors) < 2:
        raise ValueError("need at least two errors to form a rate")
    if any(e <= 0.0 for e in errors):
        raise ValueError("errors must be strictly positive (upstream failure?)")
    return [math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]


@dataclass(frozen=True)
class StudyConfig:
    """Declarative description of one convergence experiment.

    kind: "h" (refine the mesh), "delta" (grow the horizon toward the
    fractional operator at fixed mesh), or "s" (sweep the fractional order,
    reporting the rate at the finest level per s).
    """
    kind: str
    problem: str                       # "linear" | "obstacle"
    s: float | None = 0.5
    delta: float | None = 1.0
    sigma_mode: SigmaMode = SigmaMode.CONSTANT
    sigma_value: float | None = 1.0
    case: KernelCase = KernelCase.FRACTIONAL
    f: float = 1.0
    psi: str | float | None = None     # "smooth" | "kink" | number | None
    levels: tuple[int, ...] = (3, 4, 5, 6, 7)   # h = 2^-level
    ref_level: int = 11
    s_values: tuple[float, ...] = (0.1, 0.25, 0.5, 0.75)
    deltas: tuple[float, ...] = (8.0, 16.0, 32.0, 64.0)
    level: int = 9                     # fixed mesh level for delta studies
    a: float = 0.0
    b: float = 1.0
    quad: QuadOptions = DEFAULT_QUAD
    c_param: float = 1.0
    max_iterations: int = 50


@dataclass
class StudyRow:
    param: float
    energy_error: float
    energy_rate: float | None
    l2_error: float
    l2_rate: float | None
    iterations: int | None = None


@dataclass
class ConvergenceReport:
    rows: list[StudyRow]
    settings: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def obstacle_function(selector):
    """Translate a psi selector into a callable (or None for no obstacle)."""
    if selector is None or selector == "none":
        return None
    if selector == "smooth":
        return smooth_obstacle
    if selector == "kink":
        return kink_obstacle
    if isinstance(selector, (int, float)):
        v = float(selector)
        return lambda x: np.full_like(np.asarray(x, dtype=float), v)
    raise ValueError("unknown obstacle selector %r" % (selector,))


def _study_kernel(config: StudyConfig, s: float | None, delta: float) -> KernelSpec:
    return make_kernel(config.case, s, delta, config.sigma_mode,
                       sigma_value=config.sigma_value, n=1)


def _solve_instance(space: FeSpace1D, ops: OperatorSet, config: StudyConfig):
    """Solve one linear or obstacle instance; returns (u, iterations|None)."""
    if config.problem == "linear":
        b = assemble_load(space, config.f)
        return solve_linear(ops.A, b).u, None
    psi = obstacle_function(config.psi if config.psi is not None else "smooth")
    if psi is None:
        psi = -1e6
    prob = make_obstacle_problem(space, ops, config.f, psi)
    res = active_set_solve(prob, c_param=config.c_param, max_iter=config.max_iterations)
    return res.u, res.iterations


def run_study(config: StudyConfig) -> ConvergenceReport:
    """Execute the configured study; deterministic for a fixed config."""
    if config.problem not in ("linear", "obstacle"):
        raise ValueError("problem must be 'linear' or 'obstacle'")
    if config.kind == "h":
        return _run_h_study(config)
    if config.kind == "delta":
        return _run_delta_study(config)
    if config.kind == "s":
        return _run_s_study(config)
    raise ValueError("unknown study kind %r" % config.kind)


def _settings(config: StudyConfig, **extra) -> dict:
    d = {"kind": config.kind, "problem": config.problem, "s": config.s,
         "delta": config.delta, "sigma_mode": config.sigma_mode.value,
         "sigma_value": config.sigma_value, "f": config.f, "psi": config.psi,
         "ref_level": config.ref_level, "case": config.case.value}
    d.update(extra)
    return d


def _h_rows(config: StudyConfig, s: float | None, levels) -> list[StudyRow]:
    delta = float(config.delta)
    ref_space = build_space(config.a, config.b, 2 ** config.ref_level, delta)
    kernel = _study_kernel(config, s, ref_space.delta)
    # reference operators via the first-row fast path (fine, uniform mesh)
    ops_ref = operator_set(ref_space, kernel, quad=config.quad, toeplitz=True)
    A_ref, M_ref = ops_ref.A, ops_ref.M
    if config.problem == "obstacle":
        u_ref, _ = _solve_instance(ref_space, ops_ref, config)
    else:
        u_ref = solve_linear(A_ref, assemble_load(ref_space, config.f)).u
    rows = []
    prev = None
    for lvl in levels:
        space = build_space(config.a, config.b, 2 ** lvl, delta)
        ops = operator_set(space, kernel, quad=config.quad, toeplitz=False)
        u, iters = _solve_instance(space, ops, config)
        pair = error_vs_reference(space, u, ref_space, u_ref, A_ref, M_ref)
        rows.append(StudyRow(param=2.0 ** (-lvl), energy_error=pair.energy,
                             energy_rate=None if prev is None else math.log2(prev.energy / pair.energy),
                             l2_error=pair.l2,
                             l2_rate=None if prev is None else math.log2(prev.l2 / pair.l2),
                             iterations=iters))
        prev = pair
    return rows


def _run_h_study(config: StudyConfig) -> ConvergenceReport:
    rows = _h_rows(config, config.s, config.levels)
    return ConvergenceReport(rows=rows, settings=_settings(config, levels=list(config.levels)))


def _run_s_study(config: StudyConfig) -> ConvergenceReport:
    """Per fractional order: errors at the finest level and the last rate."""
    rows = []
    for s in config.s_values:
        sub = _h_rows(config, s, config.levels[-2:])
        last = sub[-1]
        rows.append(StudyRow(param=s, energy_error=last.energy_error,
                             energy_rate=last.energy_rate, l2_error=last.l2_error,
                             l2_rate=last.l2_rate, iterations=last.iterations))
    return ConvergenceReport(rows=rows, settings=_settings(config, levels=list(config.levels[-2:])))


def _run_delta_study(config: StudyConfig) -> ConvergenceReport:
    """Fixed mesh, growing horizon; error against the fractional surrogate.

    The energy error is measured in the order-s Gagliardo norm (the
    sigma = 1 member of the equivalent V-norm family), so reported values
    do not depend on the normalization the problem itself is solved with.
    """
    if config.case is not KernelCase.FRACTIONAL:
        raise ValueError("delta studies compare against the fractional operator")
    n_cells = 2 ** config.level
    # fractional surrogate via the truncation identity on a diam-wide collar
    sur_space = build_space(config.a, config.b, n_cells, config.b - config.a)
    kernel_inf = make_kernel(KernelCase.FRACTIONAL, config.s, math.inf,
                             config.sigma_mode, sigma_value=config.sigma_value, n=1)
    A_inf = infinite_horizon_matrix(sur_space, kernel_inf, quad=config.quad)
    M = assemble_mass(sur_space)
    ops_inf = OperatorSet(A=A_inf, M=M, B=np.full(sur_space.n_free, sur_space.h),
                          meta={"case": "fractional-limit"})
    u_inf, _ = _solve_instance(sur_space, ops_inf, config)
    A_norm = A_inf / kernel_inf.sigma  # Gagliardo-normalized energy
    rows = []
    prev = None
    for delta in config.deltas:
        space = build_space(config.a, config.b, n_cells, float(delta))
        kernel = kernel_inf.with_delta(space.delta)
        ops = operator_set(space, kernel, quad=config.quad, toeplitz=False)
        u, iters = _solve_instance(space, ops, config)
        e = u - u_inf
        pair = ErrorPair(energy=energy_norm(A_norm, e),
                         l2=math.sqrt(max(float(e @ (M @ e)), 0.0)))
        rows.append(StudyRow(param=float(delta), energy_error=pair.energy,
                             energy_rate=None if prev is None else math.log2(prev.energy / pair.energy),
                             l2_error=pair.l2,
                             l2_rate=None if prev is None else math.log2(prev.l2 / pair.l2),
                             iterations=iters))
        prev = pair
    return ConvergenceReport(rows=rows, settings=_settings(config, level=config.level,
                                                           deltas=list(config.deltas)))


def local_gap_study(config: StudyConfig, deltas) -> list[float]:
    """L2 gaps between the nonlocal and the classical local solution at fixed h.

    Supports both the linear problem and the obstacle problem (the local
    obstacle problem reuses the active-set solver on the (-1,2,-1)/h
    operator).  Used for shrinking-horizon comparisons.
    """
    n_cells = 2 ** config.level
    space = build_space(config.a, config.b, n_cells, float(deltas[0]))
    local_ops = local_operator_set(space)
    u_local, _ = _solve_instance(space, local_ops, config)
    M = local_ops.M
    gaps = []
    for delta in deltas:
        sp = build_space(config.a, config.b, n_cells, float(delta))
        kernel = _study_kernel(config, config.s, sp.delta)
        ops = operator_set(sp, kernel, quad=config.quad)
        u, _ = _solve_instance(sp, ops, config)
        e = u - u_local
        gaps.append(math.sqrt(max(float(e @ (M @ e)), 0.0)))
    return gaps
