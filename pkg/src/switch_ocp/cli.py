"""Command-line harness for experiments.

Subcommands: run a single instance, sweep the Tikhonov weight or the
time resolution on a shared instance, generate instance files, or run
the validation suite.  Bound traces are written as CSV with columns
iteration, cpu_seconds, lower_bound, max_violation, num_cuts,
bv_seminorm (semicolon-joined per switch).

Exit codes: 0 clean, 2 Newton failure, 3 cut cap reached, 4 bad
configuration or I/O problem.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import instancegen, outerloop, validate
from .instancegen import InstanceSpec
from .outerloop import STATUS_CONVERGED, STATUS_CUT_CAP, OuterConfig
from .ssnewton import SolverCaps

EXIT_OK = 0
EXIT_NEWTON = 2
EXIT_CUT_CAP = 3
EXIT_CONFIG = 4


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_instance_args(p):
    p.add_argument("--spec", type=Path, help="instance spec file (key = value lines)")
    p.add_argument("--seed", type=int, help="inline instance seed (alternative to --spec)")
    p.add_argument("--nx", type=int, default=9, help="nodes per side of the spatial grid")
    p.add_argument("--nt-fine", type=int, default=400, dest="nt_fine",
                   help="time intervals of the generation grid")
    p.add_argument("--sigma", type=int, default=11, help="spline jump count")
    p.add_argument("--horizon", type=float, default=2.0)


def _add_solver_args(p):
    p.add_argument("--nt", type=int, default=100, help="time intervals of the solver grid")
    p.add_argument("--sigma-max", type=int, default=2, dest="sigma_max")
    p.add_argument("--alpha", type=float, default=None,
                   help="Tikhonov weight (defaults to the instance value)")
    p.add_argument("--rho", type=float, default=1e-5)
    p.add_argument("--cut-tol-rel", type=float, default=0.01, dest="cut_tol_rel")
    p.add_argument("--cut-tol-abs", type=float, default=1e-6, dest="cut_tol_abs")
    p.add_argument("--max-cuts", type=int, default=200, dest="max_cuts")
    p.add_argument("--newton-max-iter", type=int, default=40, dest="newton_max_iter")
    p.add_argument("--krylov-tol", type=float, default=1e-12, dest="krylov_tol")
    p.add_argument("--projection", choices=("grid", "dyadic"), default="grid")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="switch-ocp", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one instance, write its bound trace")
    _add_instance_args(p_run)
    _add_solver_args(p_run)
    p_run.add_argument("--out", type=Path, required=True, help="bound-trace CSV path")

    p_sa = sub.add_parser("sweep-alpha", help="rerun one instance for several alpha")
    _add_instance_args(p_sa)
    _add_solver_args(p_sa)
    p_sa.add_argument("--alphas", default="2e-3,3e-3,5e-3,1e-2",
                      help="comma-separated Tikhonov weights")
    p_sa.add_argument("--out-dir", type=Path, required=True, dest="out_dir")

    p_sn = sub.add_parser("sweep-nt", help="rerun one instance for several grids")
    _add_instance_args(p_sn)
    _add_solver_args(p_sn)
    p_sn.add_argument("--nts", default="25,50,100", help="comma-separated interval counts")
    p_sn.add_argument("--out-dir", type=Path, required=True, dest="out_dir")

    p_gen = sub.add_parser("gen-instance", help="write an instance spec file")
    _add_instance_args(p_gen)
    p_gen.add_argument("--alpha", type=float, default=1e-2)
    p_gen.add_argument("--out", type=Path, required=True)
    p_gen.add_argument("--export-dense", type=Path, default=None, dest="export_dense",
                       help="also dump the generated arrays (npz, for debugging)")

    sub.add_parser("validate", help="run the oracle-equivalence and invariant suite")
    return parser


def _instance_spec(args, default_alpha=1e-2) -> InstanceSpec:
    if args.spec is not None and args.seed is not None:
        raise ConfigError("give either --spec or --seed, not both")
    if args.spec is not None:
        return instancegen.read_spec(args.spec)
    if args.seed is None:
        raise ConfigError("an instance is required (--spec or --seed)")
    alpha = getattr(args, "alpha", None)
    try:
        return InstanceSpec(
            seed=args.seed, nx=args.nx, sigma=args.sigma, nt_fine=args.nt_fine,
            alpha=default_alpha if alpha is None else alpha, horizon=args.horizon,
        )
    except ValueError as err:
        raise ConfigError(str(err))


def _outer_config(args, alpha: float) -> OuterConfig:
    try:
        return OuterConfig(
            alpha=alpha,
            rho=args.rho,
            cut_tol_rel=args.cut_tol_rel,
            cut_tol_abs=args.cut_tol_abs,
            max_cuts=args.max_cuts,
            newton=SolverCaps(max_iter=args.newton_max_iter, krylov_tol=args.krylov_tol),
            projection=args.projection,
        )
    except ValueError as err:
        raise ConfigError(str(err))


def write_trace(path: Path, log) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iteration", "cpu_seconds", "lower_bound", "max_violation",
             "num_cuts", "bv_seminorm"]
        )
        for rec in log:
            writer.writerow(
                [rec.iteration, f"{rec.cpu_seconds:.6f}", repr(rec.lower_bound),
                 repr(rec.max_violation), rec.num_cuts,
                 ";".join(repr(v) for v in rec.bv_seminorm)]
            )


def _single_run(instance, nt, sigma_max, config, out_path):
    if instance.spec.nt_fine % nt != 0:
        raise ConfigError(
            f"generation grid ({instance.spec.nt_fine}) must be divisible by --nt ({nt})"
        )
    problem = instancegen.problem_on_grid(instance, nt, sigma_max)
    state, log, status = outerloop.run(problem, config)
    write_trace(out_path, log)
    bound = log[-1].lower_bound if log else float("nan")
    seconds = log[-1].cpu_seconds if log else 0.0
    print(f"{out_path}: status={status} bound={bound:.12g} "
          f"cuts={log[-1].num_cuts if log else 0} cpu_seconds={seconds:.2f}")
    return status


def _status_code(status) -> int:
    if status == STATUS_CONVERGED:
        return EXIT_OK
    if status == STATUS_CUT_CAP:
        return EXIT_CUT_CAP
    return EXIT_NEWTON


def _fanout() -> int:
    raw = os.environ.get("SWITCH_OCP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SWITCH_OCP_THREADS must be an integer, got {raw!r}")


def _cmd_run(args) -> int:
    spec = _instance_spec(args)
    instance = instancegen.build_instance(spec)
    alpha = spec.alpha if args.alpha is None else args.alpha
    status = _single_run(instance, args.nt, args.sigma_max, _outer_config(args, alpha), args.out)
    return _status_code(status)


def _cmd_sweep(args, values, mode) -> int:
    spec = _instance_spec(args)
    instance = instancegen.build_instance(spec)
    base_alpha = spec.alpha if args.alpha is None else args.alpha
    if mode == "alpha":
        jobs = [(args.nt, v, args.out_dir / f"alpha_{v:g}.csv") for v in values]
    else:
        jobs = [(v, base_alpha, args.out_dir / f"nt_{v:g}.csv") for v in values]
    with ThreadPoolExecutor(max_workers=_fanout()) as pool:
        futures = [
            pool.submit(_single_run, instance, nt, args.sigma_max,
                        _outer_config(args, alpha), out)
            for nt, alpha, out in jobs
        ]
        statuses = [f.result() for f in futures]
    return max(_status_code(s) for s in statuses)


def _cmd_gen(args) -> int:
    spec = _instance_spec(args)
    instancegen.write_spec(spec, args.out)
    print(f"wrote {args.out}")
    if args.export_dense is not None:
        instancegen.export_dense(instancegen.build_instance(spec), args.export_dense)
        print(f"wrote {args.export_dense}")
    return EXIT_OK


def _cmd_validate() -> int:
    ok, results = validate.run_all()
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return EXIT_OK if ok else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep-alpha":
            alphas = [float(v) for v in args.alphas.split(",") if v]
            return _cmd_sweep(args, alphas, "alpha")
        if args.command == "sweep-nt":
            nts = [int(v) for v in args.nts.split(",") if v]
            return _cmd_sweep(args, nts, "nt")
        if args.command == "gen-instance":
            return _cmd_gen(args)
        if args.command == "validate":
            return _cmd_validate()
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
