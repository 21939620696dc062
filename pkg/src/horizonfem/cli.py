"""Command-line front end: single solves, convergence studies, CSV export.

Exit status: 0 on success, 1 on numerical failure, 2 on usage errors.
All CSV output uses 17 significant digits, '.' decimals and '\n' line
endings, so files are byte-identical across repeated runs.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import StudyConfig, obstacle_function, run_study
from .assembly import assemble_load, local_operator_set, operator_set
from .grid import build_space
from .kernels import KernelCase, SigmaMode, make_kernel
from .linear import solve_linear, solve_local_reference
from .obstacle import active_set_solve, make_obstacle_problem, penalty_solve


def _fmt(x: float) -> str:
    return "%.17g" % x


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else _fmt(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _parse_sigma(text: str):
    if text.startswith("constant:"):
        return SigmaMode.CONSTANT, float(text.split(":", 1)[1])
    aliases = {"fractional": SigmaMode.FRACTIONAL_NORMALIZATION,
               "local": SigmaMode.LOCAL_SCALING,
               "inv2dsq": SigmaMode.INVERSE_TWO_DELTA_SQ}
    if text in aliases:
        return aliases[text], None
    raise ValueError("sigma must be constant:<value>, fractional, local, or inv2dsq")


def _parse_psi(text: str):
    if text in ("smooth", "kink", "none"):
        return text
    if text.startswith("const:"):
        return float(text.split(":", 1)[1])
    raise ValueError("psi must be smooth, kink, const:<value>, or none")


def _parse_levels(text: str) -> tuple[int, ...]:
    lo, _, hi = text.partition(":")
    if not hi:
        raise ValueError("levels must be given as lo:hi, e.g. 3:7")
    lo_i, hi_i = int(lo), int(hi)
    if hi_i < lo_i:
        raise ValueError("levels range is empty")
    return tuple(range(lo_i, hi_i + 1))


def _kernel_args(p: argparse.ArgumentParser):
    p.add_argument("--case", choices=["fractional", "constant", "peridynamic"],
                   default="fractional")
    p.add_argument("--s", type=float, default=None, help="fractional order in (0,1)")
    p.add_argument("--delta", type=float, required=True, help="interaction horizon")
    p.add_argument("--sigma", default="constant:1",
                   help="constant:<v> | fractional | local | inv2dsq")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="horizonfem",
                                 description="1D nonlocal diffusion FE solver suite")
    sub = ap.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one problem and export x,u[,lambda]")
    _kernel_args(solve)
    solve.add_argument("--problem", choices=["linear", "obstacle"], default="linear")
    solve.add_argument("--cells", type=int, required=True)
    solve.add_argument("--f", type=float, default=1.0)
    solve.add_argument("--psi", default="smooth")
    solve.add_argument("--method", choices=["active-set", "penalty"], default="active-set")
    solve.add_argument("--epsilon", type=float, default=1e-6)
    solve.add_argument("--max-iter", type=int, default=50)
    solve.add_argument("--out", required=True)

    for kind in ("study-h", "study-s"):
        st = sub.add_parser(kind, help="convergence study -> report CSV")
        _kernel_args(st)
        st.add_argument("--problem", choices=["linear", "obstacle"], default="linear")
        st.add_argument("--f", type=float, default=1.0)
        st.add_argument("--psi", default="smooth")
        st.add_argument("--levels", required=True, help="mesh levels lo:hi (h = 2^-level)")
        st.add_argument("--ref-level", type=int, required=True)
        if kind == "study-s":
            st.add_argument("--s-values", default="0.1,0.25,0.5,0.75")
        st.add_argument("--out", required=True)

    sd = sub.add_parser("study-delta", help="horizon study against the fractional surrogate")
    sd.add_argument("--s", type=float, default=0.5)
    sd.add_argument("--sigma", default="fractional")
    sd.add_argument("--problem", choices=["linear", "obstacle"], default="obstacle")
    sd.add_argument("--f", type=float, default=0.25)
    sd.add_argument("--psi", default="smooth")
    sd.add_argument("--deltas", default="8,16,32,64")
    sd.add_argument("--level", type=int, default=9)
    sd.add_argument("--out", required=True)

    cl = sub.add_parser("compare-local", help="nonlocal vs local profiles at shrinking horizons")
    cl.add_argument("--s", type=float, default=0.5)
    cl.add_argument("--sigma", default="local")
    cl.add_argument("--problem", choices=["linear", "obstacle"], default="obstacle")
    cl.add_argument("--cells", type=int, default=512)
    cl.add_argument("--f", type=float, default=-1.0)
    cl.add_argument("--psi", default="smooth")
    cl.add_argument("--deltas", default="0.25,0.125,0.0625")
    cl.add_argument("--max-iter", type=int, default=1000)
    cl.add_argument("--out", required=True)
    return ap


def _cmd_solve(args) -> int:
    case = KernelCase(args.case)
    sigma_mode, sigma_value = _parse_sigma(args.sigma)
    space = build_space(0.0, 1.0, args.cells, args.delta)
    kernel = make_kernel(case, args.s, space.delta, sigma_mode, sigma_value)
    ops = operator_set(space, kernel)
    x = space.nodes
    if args.problem == "linear":
        u = solve_linear(ops.A, assemble_load(space, args.f)).u
        rows = [(float(xi), float(ui)) for xi, ui in zip(x, space.full_vector(u))]
        _write_csv(args.out, ["x", "u"], rows)
        return 0
    psi = obstacle_function(_parse_psi(args.psi))
    problem = make_obstacle_problem(space, ops, args.f, psi if psi is not None else -1e6)
    if args.method == "active-set":
        result = active_set_solve(problem, max_iter=args.max_iter)
        u, lam = result.u, result.lam
    else:
        u, lam = penalty_solve(problem, args.epsilon, max_iter=args.max_iter)
    rows = [(float(xi), float(ui), float(li))
            for xi, ui, li in zip(x, space.full_vector(u), space.full_vector(lam))]
    _write_csv(args.out, ["x", "u", "lambda"], rows)
    return 0


def _report_rows(report):
    return [(float(r.param), float(r.energy_error), r.energy_rate,
             float(r.l2_error), r.l2_rate) for r in report.rows]


def _cmd_study(args, kind: str) -> int:
    sigma_mode, sigma_value = _parse_sigma(args.sigma)
    common = dict(problem=args.problem, case=KernelCase(args.case),
                  sigma_mode=sigma_mode, sigma_value=sigma_value,
                  f=args.f, psi=_parse_psi(args.psi) if args.problem == "obstacle" else None,
                  ref_level=args.ref_level, delta=args.delta)
    if kind == "h":
        cfg = StudyConfig(kind="h", s=args.s, levels=_parse_levels(args.levels), **common)
    else:
        s_values = tuple(float(t) for t in args.s_values.split(","))
        cfg = StudyConfig(kind="s", s_values=s_values, levels=_parse_levels(args.levels),
                          **common)
    report = run_study(cfg)
    header = ["param", "energy_error", "energy_rate", "l2_error", "l2_rate"]
    _write_csv(args.out, header, _report_rows(report))
    return 0


def _cmd_study_delta(args) -> int:
    sigma_mode, sigma_value = _parse_sigma(args.sigma)
    deltas = tuple(float(t) for t in args.deltas.split(","))
    cfg = StudyConfig(kind="delta", problem=args.problem, s=args.s,
                      sigma_mode=sigma_mode, sigma_value=sigma_value, f=args.f,
                      psi=_parse_psi(args.psi) if args.problem == "obstacle" else None,
                      deltas=deltas, level=args.level)
    report = run_study(cfg)
    header = ["param", "energy_error", "energy_rate", "l2_error", "l2_rate"]
    _write_csv(args.out, header, _report_rows(report))
    return 0


def _cmd_compare_local(args) -> int:
    sigma_mode, sigma_value = _parse_sigma(args.sigma)
    deltas = [float(t) for t in args.deltas.split(",")]
    space = build_space(0.0, 1.0, args.cells, deltas[0])
    psi_sel = _parse_psi(args.psi) if args.problem == "obstacle" else None
    psi = obstacle_function(psi_sel) if psi_sel is not None else None

    def solve_one(ops, sp):
        if args.problem == "linear":
            return solve_linear(ops.A, assemble_load(sp, args.f)).u, None
        problem = make_obstacle_problem(sp, ops, args.f, psi if psi is not None else -1e6)
        res = active_set_solve(problem, max_iter=args.max_iter)
        return res.u, res.lam

    if args.problem == "linear":
        u_local, lam_local = solve_local_reference(space, args.f), None
    else:
        u_local, lam_local = solve_one(local_operator_set(space), space)
    # profiles over the Omega nodes (collar values are identically zero)
    n = args.cells
    idx = slice(space.k_delta, space.k_delta + n + 1)
    cols = [space.nodes[idx], space.full_vector(u_local)[idx]]
    header = ["x", "u_local"]
    if lam_local is not None:
        header.append("lambda_local")
        cols.append(space.full_vector(lam_local)[idx])
    for d in deltas:
        sp = build_space(0.0, 1.0, args.cells, d)
        kernel = make_kernel(KernelCase.FRACTIONAL, args.s, sp.delta, sigma_mode, sigma_value)
        u, lam = solve_one(operator_set(sp, kernel), sp)
        tag = ("%g" % d).replace(".", "p")
        header.append("u_delta_" + tag)
        cols.append(sp.full_vector(u)[sp.k_delta:sp.k_delta + n + 1])
        if lam is not None:
            header.append("lambda_delta_" + tag)
            cols.append(sp.full_vector(lam)[sp.k_delta:sp.k_delta + n + 1])
    rows = [tuple(float(c[i]) for c in cols) for i in range(n + 1)]
    _write_csv(args.out, header, rows)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "study-h":
            return _cmd_study(args, "h")
        if args.command == "study-s":
            return _cmd_study(args, "s")
        if args.command == "study-delta":
            return _cmd_study_delta(args)
        if args.command == "compare-local":
            return _cmd_compare_local(args)
        raise ValueError("unknown command %r" % args.command)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
