"""Command-line interface.

Subcommands: run (simulate a built-in or file-defined scenario), compare
(two saved reports), list-scenarios, verify-transform (matched-coordinates
consistency checks), finite-time (scalar reaching-law check).

Exit codes: 0 success, 2 config error, 3 divergence, 4 comparison assertion
failed.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import scenarios as sc
from .finitetime import FiniteTimeSpec, lyapunov_settling_bound, settling_time, simulate_reaching_law
from .metrics import compare
from .plant import (
    PlantParams,
    pmdc_cross_model_residual,
    simulate_mismatched_example,
    verify_brunovsky_transform,
)
from .simcore import TimeGrid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_ASSERTION = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adrcsim",
        description="Disturbance-rejection control benchmarks on a PMDC motor",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and write trace + report")
    p_run.add_argument("--scenario", required=True,
                       help="built-in name (see list-scenarios) or a key=value file")
    p_run.add_argument("--observer", choices=sc.OBSERVER_KINDS,
                       help="override the observer kind")
    p_run.add_argument("--omega0", type=float, help="override the observer bandwidth")
    p_run.add_argument("--dt", type=float, help="override the integration step")
    p_run.add_argument("--seed", type=int, help="override the seed")
    p_run.add_argument("--out", default=".", help="output directory (default: .)")

    p_cmp = sub.add_parser("compare", help="compare two saved reports")
    p_cmp.add_argument("--a", required=True, help="first report (.txt or .json)")
    p_cmp.add_argument("--b", required=True, help="second report")
    p_cmp.add_argument(
        "--max-ratio", action="append", default=[], metavar="METRIC=LIMIT",
        help="assert metric ratio a/b < LIMIT (itae, isu, or peak.<channel>); "
             "repeatable; violation exits 4",
    )

    sub.add_parser("list-scenarios", help="list the built-in scenarios")

    p_ver = sub.add_parser(
        "verify-transform",
        help="check the mismatched-to-matched change of coordinates numerically",
    )
    p_ver.add_argument("--dt", type=float, default=1e-4)
    p_ver.add_argument("--horizon", type=float, default=1.0)
    p_ver.add_argument("--tolerance", type=float, default=1e-3,
                       help="residual bound for the worked example")
    p_ver.add_argument("--motor-tolerance", type=float, default=1e-4,
                       help="velocity mismatch bound for the two motor models")

    p_ft = sub.add_parser(
        "finite-time", help="scalar reaching law: closed form vs. integration"
    )
    p_ft.add_argument("--k", type=float, required=True)
    p_ft.add_argument("--alpha", type=float, required=True)
    p_ft.add_argument("--e0", type=float, required=True)
    p_ft.add_argument("--dt", type=float, default=None,
                      help="integration step (default: 1e-4 x predicted settling)")
    p_ft.add_argument("--c", type=float, default=2.0,
                      help="decay constant of the settling bound (> 1)")

    return parser


def _cmd_run(args) -> int:
    target = Path(args.scenario)
    if target.exists():
        config = sc.parse_scenario_file(target)
    else:
        config = sc.get_scenario(args.scenario)

    if args.observer is not None or args.omega0 is not None:
        obs = config.observer
        obs = replace(
            obs,
            kind=args.observer if args.observer is not None else obs.kind,
            omega0=args.omega0 if args.omega0 is not None else obs.omega0,
        )
        controller = sc.ControllerSpec.tuned_for(
            obs.kind, td_bypass=config.controller.td_bypass
        )
        config = replace(config, observer=obs, controller=controller)
    if args.dt is not None:
        config = replace(
            config, grid=TimeGrid(config.grid.t0, config.grid.tf, args.dt)
        )
    if args.seed is not None:
        noise = config.noise
        if noise is not None:
            noise = replace(noise, seed=args.seed)
        config = replace(config, seed=args.seed, noise=noise)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace, report = sc.run_scenario(config)
    sc.write_trace_csv(trace, out_dir / f"{config.name}.csv")
    sc.write_report(report, out_dir / f"{config.name}.report")
    sys.stdout.write(sc.report_to_text(report))
    if report.diverged:
        print(f"run diverged at t = {trace.times[-1]:.6g} s", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = sc.load_report(args.a)
    b = sc.load_report(args.b)
    result = compare(a, b)
    print(f"a: {result.a}")
    print(f"b: {result.b}")
    print(f"itae_ratio: {result.itae_ratio:.9g}")
    print(f"isu_ratio: {result.isu_ratio:.9g}")
    for name, ratio in result.peak_ratios.items():
        print(f"peak_ratio.{name}: {ratio:.9g}")
    for name, verdict in result.verdicts.items():
        print(f"verdict.{name}: {verdict}")

    failed = False
    for raw in args.max_ratio:
        metric, _, limit_text = raw.partition("=")
        if not limit_text:
            raise sc.ScenarioError(f"--max-ratio expects METRIC=LIMIT, got {raw!r}")
        limit = float(limit_text)
        if metric == "itae":
            ratio = result.itae_ratio
        elif metric == "isu":
            ratio = result.isu_ratio
        elif metric.startswith("peak.") and metric[5:] in result.peak_ratios:
            ratio = result.peak_ratios[metric[5:]]
        else:
            raise sc.ScenarioError(f"unknown metric {metric!r} in --max-ratio")
        ok = ratio < limit
        print(f"assert {metric} ratio {ratio:.9g} < {limit:g}: {'ok' if ok else 'FAILED'}")
        failed |= not ok
    return EXIT_ASSERTION if failed else EXIT_OK


def _cmd_list(_args) -> int:
    for name, blurb in sc.builtin_scenarios().items():
        print(f"{name:22s} {blurb}")
    return EXIT_OK


def _cmd_verify_transform(args) -> int:
    grid = TimeGrid(0.0, args.horizon, args.dt)
    # start at x1 = -1: the open-loop example escapes in finite time, and
    # from the origin it would do so just before t = 1 under d = sin(t)
    trace = simulate_mismatched_example(
        grid, x0=(-1.0, 0.0), d_fn=math.sin, d_dot_fn=math.cos
    )
    res = verify_brunovsky_transform(trace, tolerance=args.tolerance)
    print(f"example.velocity_residual: {res.velocity:.6g}")
    print(f"example.dynamics_residual: {res.dynamics:.6g}")
    print(f"example.tolerance: {res.tolerance:g}")
    print(f"example.passed: {'true' if res.passed else 'false'}")

    frictionless = replace(PlantParams.nominal(), Fc=0.0)
    mismatch = pmdc_cross_model_residual(
        frictionless,
        grid,
        v_fn=lambda t: 1.0,
        Text_fn=lambda t: math.sin(t),
        Text_dot_fn=lambda t: math.cos(t),
    )
    motor_ok = mismatch < args.motor_tolerance
    print(f"motor.velocity_mismatch: {mismatch:.6g}")
    print(f"motor.tolerance: {args.motor_tolerance:g}")
    print(f"motor.passed: {'true' if motor_ok else 'false'}")
    return EXIT_OK if (res.passed and motor_ok) else EXIT_ASSERTION


def _cmd_finite_time(args) -> int:
    spec = FiniteTimeSpec(
        k=args.k, alpha=args.alpha, e0=args.e0, c=args.c, V0=args.e0**2 / 2.0
    )
    analytic = settling_time(spec)
    dt = args.dt if args.dt is not None else max(1e-4 * analytic, 1e-12)
    if analytic == 0.0:
        print("analytic_settling: 0")
        print("empirical_settling: 0")
        return EXIT_OK
    run = simulate_reaching_law(spec, dt)
    bound = lyapunov_settling_bound(spec)
    print(f"analytic_settling: {analytic:.9g}")
    print(f"empirical_settling: {run.settled:.9g}")
    print(f"capture_band: {run.band:.6g}")
    print(f"lyapunov_bound: {bound:.9g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "compare": _cmd_compare,
        "list-scenarios": _cmd_list,
        "verify-transform": _cmd_verify_transform,
        "finite-time": _cmd_finite_time,
    }
    try:
        return handlers[args.command](args)
    except (sc.ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def console_main() -> None:
    raise SystemExit(main())
