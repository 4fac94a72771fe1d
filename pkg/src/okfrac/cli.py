"""Command-line entry point.

Subcommands: solve (offline oracle), run (one traced online run), simulate
(Monte Carlo campaign), bounds (closed-form bound evaluation), optimize
(phase-split optimization). Every subcommand is deterministic given its full
flag set including the seed. Exit codes: 0 success, 2 usage or input error,
3 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import bounds as bounds_mod
from . import sim as sim_mod
from .core import (
    Instance,
    load_instance,
    save_instance,
    solve_fractional,
)
from .errors import ConvergenceFailure, OkfracError
from .online import PhaseParams, permutation_from_positions, run as run_online

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3


def _emit_number(x):
    return str(x) if isinstance(x, Fraction) else x


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fp:
            fp.write(text)
            if not text.endswith("\n"):
                fp.write("\n")


def _json_dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _load(path: str, mode: str) -> Instance:
    return load_instance(path, mode=mode)


def _resolve_instance(args) -> Instance:
    if getattr(args, "instance", None):
        inst = _load(args.instance, getattr(args, "mode", "float"))
    else:
        spec = sim_mod.GeneratorSpec(
            family=sim_mod.Family(args.family),
            n=args.n,
            k=args.k,
            split_d=args.split_d,
        )
        inst = sim_mod.generate(spec, args.seed)
    if getattr(args, "dump_instance", None):
        save_instance(inst, args.dump_instance)
    return inst


def cmd_solve(args) -> int:
    inst = _load(args.instance, args.mode)
    sol = solve_fractional(inst)
    doc = {
        "schema_version": 1,
        "objective": _emit_number(sol.objective),
        "threshold_density": _emit_number(sol.threshold_density),
        "support_size": sol.support_size,
        "fractions": {str(k): _emit_number(v) for k, v in sorted(sol.packing.fractions.items())},
        "utilizations": {str(k): _emit_number(v) for k, v in sorted(sol.utilizations.items())},
    }
    if args.format == "json":
        _write_output(_json_dumps(doc), args.out)
    else:
        lines = ["id,fraction,utilization"]
        for k in sorted(sol.packing.fractions):
            lines.append(
                f"{k},{_emit_number(sol.packing.fractions[k])},{_emit_number(sol.utilizations[k])}"
            )
        lines.append(f"# objective,{_emit_number(sol.objective)}")
        _write_output("\n".join(lines), args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    inst = _resolve_instance(args)
    n = len(inst.items)
    params = PhaseParams(c=args.c, d=args.d, n=n)
    if args.permutation:
        order = [int(tok) for tok in args.permutation.split(",")]
    else:
        order = permutation_from_positions(
            inst, sim_mod.random_permutation(n, args.seed, args.trial_index)
        )
    trace = run_online(inst, order, params)
    opt = solve_fractional(inst).objective
    doc = {
        "schema_version": 1,
        "final_objective": _emit_number(trace.final_objective),
        "offline_optimum": _emit_number(opt),
        "ratio": float(trace.final_objective) / float(opt) if opt else None,
        "secretary_packed_nothing": trace.secretary_packed_nothing,
        "phase_acceptances": trace.phase_acceptances(),
        "first_secretary_acceptance": trace.first_secretary_acceptance(),
    }
    _write_output(_json_dumps(doc), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _resolve_instance(args)
    n = len(inst.items)
    params = PhaseParams(c=args.c, d=args.d, n=n)
    deltas = [float(tok) for tok in args.delta_grid.split(",")] if args.delta_grid else [args.delta]
    reports = []
    stats = None
    for delta in deltas:
        stats = sim_mod.run_trials(inst, params, args.trials, args.seed, delta=delta,
                                   max_rank=args.max_rank)
        reports.append(sim_mod.trial_stats_to_dict(stats))
    doc = reports[0] if len(reports) == 1 else {"schema_version": 1, "by_delta": reports}
    _write_output(_json_dumps(doc), args.out)
    if args.per_trial_csv and stats is not None:
        with open(args.per_trial_csv, "w", encoding="utf-8", newline="") as fp:
            sim_mod.write_per_trial_csv(stats, fp)
    return EXIT_OK


def cmd_bounds(args) -> int:
    # Single-value selectors print one bare number for scripting.
    if args.d_min:
        _write_output(repr(bounds_mod.d_min()), args.out)
        return EXIT_OK
    if args.z_many:
        _write_output(repr(bounds_mod.z_many(args.c, args.d)), args.out)
        return EXIT_OK
    if args.z_single:
        _write_output(repr(bounds_mod.z_single(args.c, args.d)), args.out)
        return EXIT_OK
    if args.mu_bar:
        _write_output(repr(bounds_mod.mu_bar(args.d)), args.out)
        return EXIT_OK

    doc = {
        "schema_version": 1,
        "c": args.c,
        "d": args.d,
        "d_min": bounds_mod.d_min(),
        "mu_bar": bounds_mod.mu_bar(args.d),
        "z_single": bounds_mod.z_single(args.c, args.d),
        "z_many": bounds_mod.z_many(args.c, args.d),
        "excess_constants": list(bounds_mod.excess_constants(args.c, args.d)),
        "p": {
            str(i): bounds_mod.p_lower(i, args.c, args.d)
            for i in range(1, args.p_max + 1)
        },
        "q": {
            repr(mu): bounds_mod.q_lower(mu, args.d)
            for mu in [k * args.q_step for k in range(0, int(1.0 / args.q_step) + 1)]
            if mu <= 1.0
        },
    }
    if args.n is not None:
        doc["prob_pack_total"] = {
            repr(delta): bounds_mod.prob_pack_total(args.n, args.d, delta)
            for delta in (0.1, 0.3, 0.5, 0.7)
        }
    _write_output(_json_dumps(doc), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    result = bounds_mod.optimize_params(tolerance=args.tolerance, equal_cd=args.equal_cd)
    doc = {
        "schema_version": 1,
        "c_star": result.c_star,
        "d_star": result.d_star,
        "z_star": result.z_star,
        "ratio": result.ratio,
        "constraint_gap": result.constraint_gap,
    }
    _write_output(_json_dumps(doc), args.out)
    if args.sweep_out:
        rows = bounds_mod.grid_sweep(points=args.sweep_points)
        with open(args.sweep_out, "w", encoding="utf-8") as fp:
            fp.write("d,c_of_d,z,ratio\n")
            for d, c, z, ratio in rows:
                fp.write(f"{d!r},{c!r},{z!r},{ratio!r}\n")
    return EXIT_OK


def _add_instance_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--instance", help="instance JSON file")
    parser.add_argument(
        "--family",
        choices=[f.value for f in sim_mod.Family],
        default=sim_mod.Family.SINGLE_DOMINANT.value,
        help="generator family when no --instance is given",
    )
    parser.add_argument("--n", type=int, default=2000, help="generated instance size")
    parser.add_argument("--k", type=int, default=10, help="optimal support size for equal_k")
    parser.add_argument(
        "--split-d",
        dest="split_d",
        type=float,
        default=sim_mod.CALIBRATED_SPLIT_D,
        help="phase split for mu_bar_split",
    )
    parser.add_argument(
        "--dump-instance",
        dest="dump_instance",
        help="write the instance actually used to this path",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="okfrac",
        description="Online fractional knapsack in the random order model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="exact offline fractional optimum of an instance file")
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--mode", choices=["rational", "float"], default="rational")
    p_solve.add_argument("--format", choices=["json", "csv"], default="json")
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=cmd_solve)

    p_run = sub.add_parser("run", help="one traced online run")
    _add_instance_source(p_run)
    p_run.add_argument("--mode", choices=["rational", "float"], default="float")
    p_run.add_argument("--c", type=float, default=bounds_mod.DEFAULT_C)
    p_run.add_argument("--d", type=float, default=bounds_mod.DEFAULT_D)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--trial-index", type=int, default=0)
    p_run.add_argument("--permutation", help="comma-separated item ids in arrival order")
    p_run.add_argument("--out")
    p_run.set_defaults(func=cmd_run)

    p_sim = sub.add_parser("simulate", help="Monte Carlo campaign")
    _add_instance_source(p_sim)
    p_sim.add_argument("--mode", choices=["rational", "float"], default="float")
    p_sim.add_argument("--c", type=float, default=bounds_mod.DEFAULT_C)
    p_sim.add_argument("--d", type=float, default=bounds_mod.DEFAULT_D)
    p_sim.add_argument("--trials", type=int, default=20000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--delta", type=float, default=0.3)
    p_sim.add_argument("--delta-grid", dest="delta_grid", help="comma-separated deltas")
    p_sim.add_argument("--max-rank", dest="max_rank", type=int, default=10)
    p_sim.add_argument("--per-trial-csv", dest="per_trial_csv")
    p_sim.add_argument("--out")
    p_sim.set_defaults(func=cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="closed-form bound values")
    p_bounds.add_argument("--c", type=float, default=bounds_mod.DEFAULT_C)
    p_bounds.add_argument("--d", type=float, default=bounds_mod.DEFAULT_D)
    p_bounds.add_argument("--n", type=int)
    p_bounds.add_argument("--p-max", dest="p_max", type=int, default=10)
    p_bounds.add_argument("--q-step", dest="q_step", type=float, default=0.1)
    p_bounds.add_argument("--d-min", dest="d_min", action="store_true",
                          help="print only the vacuous-bound root")
    p_bounds.add_argument("--z-many", dest="z_many", action="store_true")
    p_bounds.add_argument("--z-single", dest="z_single", action="store_true")
    p_bounds.add_argument("--mu-bar", dest="mu_bar", action="store_true")
    p_bounds.add_argument("--out")
    p_bounds.set_defaults(func=cmd_bounds)

    p_opt = sub.add_parser("optimize", help="optimize the phase split")
    p_opt.add_argument("--tolerance", type=float, default=1e-10)
    p_opt.add_argument("--equal-cd", dest="equal_cd", action="store_true",
                       help="constrain c = d")
    p_opt.add_argument("--sweep-out", dest="sweep_out", help="write the coarse (d, c, z, ratio) CSV")
    p_opt.add_argument("--sweep-points", dest="sweep_points", type=int, default=200)
    p_opt.add_argument("--out")
    p_opt.set_defaults(func=cmd_optimize)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (OkfracError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
