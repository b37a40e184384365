"""Command-line front end.

    bregman-ep validate CONFIG
    bregman-ep run CONFIG [--max-iters N] [--tol T] [--anchor U] [--trace-out PATH]
    bregman-ep reproduce-example [--lam L] [--identity-s]
    bregman-ep check-properties [--seed S] [--cases N]

Exit codes: 0 success/converged, 1 validation or assertion failure,
2 configuration parse error, 3 iteration cap reached, 4 solver stage error.
"""
import argparse
import sys
from dataclasses import replace

import numpy as np

from . import properties
from .config import ConfigError, load
from .presets import paper_problem, preset_run_config
from .problem import LinearMap, validate_problem
from .solver import ParamSchedule, Status, run, validate_schedule
from .trace_io import RunArtifact, write_trace_csv

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_MAX_ITERS, EXIT_STAGE = 0, 1, 2, 3, 4

Y_RATIO = 23 / 64
Z_RATIO = 1841 / 4096


def _load(path, err):
    try:
        return load(path)
    except (OSError, ConfigError) as exc:
        print(f"error: cannot load {path}: {exc}", file=err)
        return None


def validation_report(cfg):
    """(ok, lines) for the schedule and the sampled problem assumptions."""
    prob = cfg.problem
    sched = validate_schedule(cfg.schedule, cfg.validation_horizon, prob.c1, prob.c2)
    lines = [f"schedule: {line}" for line in sched.lines()]
    checks = validate_problem(prob, np.random.default_rng(cfg.seed), cfg.samples)
    for rep in checks:
        lines.append(f"{'ok  ' if rep.passed else 'FAIL'} {rep.name}: {rep.value:.6g}")
    return sched.ok and all(rep.passed for rep in checks), lines


def cmd_validate(args, out=None, err=None):
    out, err = out or sys.stdout, err or sys.stderr
    cfg = _load(args.config, err)
    if cfg is None:
        return EXIT_PARSE
    ok, lines = validation_report(cfg)
    print("\n".join(lines), file=out)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_run(args, out=None, err=None):
    out, err = out or sys.stdout, err or sys.stderr
    cfg = _load(args.config, err)
    if cfg is None:
        return EXIT_PARSE
    run_cfg = cfg.run
    if args.max_iters is not None:
        run_cfg = replace(run_cfg, max_iters=args.max_iters)
    if args.tol is not None:
        run_cfg = replace(run_cfg, residual_tol=args.tol)
    if args.anchor is not None:
        run_cfg = replace(run_cfg, anchor_u=np.full(cfg.problem.spec.dim, args.anchor))
    cfg = replace(cfg, run=run_cfg)
    ok, lines = validation_report(cfg)
    if not ok:
        print("\n".join(lines), file=err)
        return EXIT_INVALID

    result = run(cfg.problem, cfg.schedule, run_cfg)
    dim = cfg.problem.spec.dim
    if args.trace_out in (None, "-"):
        write_trace_csv(result.trace, out, dim)
    else:
        with open(args.trace_out, "w", newline="") as fh:
            write_trace_csv(result.trace, fh, dim)
    if args.artifact_out:
        art = RunArtifact(cfg.text, result.trace, result.solution, result.status.value, result.wall_time)
        with open(args.artifact_out, "w") as fh:
            fh.write(art.to_json())
    sol = ", ".join(f"{v:.17g}" for v in result.solution)
    print(f"{result.status.value} after {result.iterations} iterations; x = [{sol}]", file=err)
    if result.status is Status.ERROR:
        print(f"error: {result.error}", file=err)
        return EXIT_STAGE
    return EXIT_OK if result.status is Status.CONVERGED else EXIT_MAX_ITERS


def reproduce_example(lam=1 / 32, identity_s=False, iters=100, show=10, out=None):
    """Run the worked example and check the prox ratios; returns (ok, trace)."""
    out = out or sys.stdout
    prob = paper_problem()
    if identity_s:
        prob = replace(prob, S=LinearMap.identity(1))
    sched = replace(ParamSchedule.paper_example(), lam=lam)
    result = run(prob, sched, preset_run_config("paper-example", max_iters=iters))
    lo, hi = prob.cset.lower[0], prob.cset.upper[0]
    print(f"{'n':>4} {'x_n':>24} {'y_n/x_n':>22} {'z_n/x_n':>22}", file=out)
    ok = True
    for row in result.trace:
        x, y, z = row.x[0], row.y[0], row.z[0]
        if x == 0.0:
            continue
        y_in, z_in = lo < y < hi, lo < z < hi
        if row.n <= show:
            ry = f"{y / x:.17g}" if y_in else "(clamped)"
            rz = f"{z / x:.17g}" if y_in and z_in else "(clamped)"
            print(f"{row.n:>4} {x:>24.17g} {ry:>22} {rz:>22}", file=out)
        if y_in and abs(y / x - Y_RATIO) > 1e-12:
            print(f"ratio check failed at n={row.n}: y/x = {float(y / x)!r}, expected {Y_RATIO!r}", file=out)
            ok = False
            break
        if y_in and z_in and abs(z / x - Z_RATIO) > 1e-12:
            print(f"ratio check failed at n={row.n}: z/x = {float(z / x)!r}, expected {Z_RATIO!r}", file=out)
            ok = False
            break
    if ok:
        print(f"prox ratios y/x = 23/64 and z/x = 1841/4096 hold over {result.iterations} iterations",
              file=out)
    return ok, result.trace


def cmd_reproduce(args, out=None, err=None):
    out, err = out or sys.stdout, err or sys.stderr
    ok, _ = reproduce_example(lam=args.lam, identity_s=args.identity_s, iters=args.iters, out=out)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_check_properties(args, out=None, err=None):
    out, err = out or sys.stdout, err or sys.stderr
    results = properties.run_all(seed=args.seed, cases=args.cases)
    for r in results:
        print(r.line(), file=out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


def build_parser():
    p = argparse.ArgumentParser(prog="bregman-ep", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check schedule and problem assumptions")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run the solver and write the trace as CSV")
    r.add_argument("config")
    r.add_argument("--max-iters", type=int)
    r.add_argument("--tol", type=float)
    r.add_argument("--anchor", type=float, help="anchor point (broadcast to all coordinates)")
    r.add_argument("--trace-out", help="CSV path, '-' for stdout (default)")
    r.add_argument("--artifact-out", help="write a JSON run summary with the config echo")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("reproduce-example", help="rerun the 1D worked example")
    e.add_argument("--lam", type=float, default=1 / 32)
    e.add_argument("--identity-s", action="store_true")
    e.add_argument("--iters", type=int, default=100)
    e.set_defaults(func=cmd_reproduce)

    c = sub.add_parser("check-properties", help="randomized invariant sweeps")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cases", type=int, default=100)
    c.set_defaults(func=cmd_check_properties)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
