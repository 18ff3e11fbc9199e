"""Command-line front end: ``python -m slice_guard <command> ...``.

Exit codes: 0 ok, 1 violation or oracle mismatch, 2 parse error,
3 infeasible, 4 time limit without incumbent, 5 search space too large.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import io
from .catalog import PRESETS, SWEEP_VARIABLES, SweepSpec, apply_sweep, preset
from .evaluate import check_placement, derive_quantities
from .metrics import EXPOSURE_COLUMNS, compute_metrics, exposure_row, write_metrics, write_table
from .model import SecurityToggles, Weights, validate_scenario
from .solver import (
    Infeasible,
    InvalidScenario,
    SolveReport,
    SolverConfig,
    SpaceTooLarge,
    TimeoutNoIncumbent,
    greedy_warmstart,
    solve,
    solve_bruteforce,
)

OK, VIOLATION, PARSE, INFEASIBLE, TIMEOUT, TOO_LARGE = 0, 1, 2, 3, 4, 5
ORACLE_RTOL = 1e-9


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("SLICE_GUARD_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"SLICE_GUARD_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"SLICE_GUARD_THREADS must be a positive integer, got {raw!r}")
    return n


def _on_off(v):
    return None if v is None else v == "on"


def _load(args):
    """Scenario from --preset or --scenario with command-line overrides applied; plus its sweep."""
    if bool(args.preset) == bool(args.scenario):
        raise UsageError("give exactly one of --preset or --scenario")
    sweep = None
    if args.preset:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
        p = preset(args.preset, seed=args.seed if args.seed is not None else 42)
        sc, sweep = p.scenario, p.sweep
    else:
        sc = io.load_scenario(args.scenario)
        if args.seed is not None:
            sc = sc.replace(seed=args.seed)
    tg = sc.toggles
    ex, mt = _on_off(args.exposure), _on_off(args.max_traffic)
    if ex is not None or mt is not None:
        sc = sc.replace(toggles=SecurityToggles(
            tg.exposure if ex is None else ex, tg.max_traffic if mt is None else mt))
    if args.w_cap is not None or args.w_delay is not None:
        w = sc.weights
        sc = sc.replace(weights=Weights(
            w.capacity if args.w_cap is None else args.w_cap,
            w.delay if args.w_delay is None else args.w_delay))
    return sc, sweep


def _config(args, time_limit=None) -> SolverConfig:
    return SolverConfig(
        time_limit=time_limit if time_limit is not None else args.time_limit,
        node_limit=args.node_limit,
        bound=args.bound,
    )


def _print_violations(violations) -> None:
    for v in violations:
        print(f"  {v.kind}: {v.where} {v.detail}".rstrip())


def _run_solver(sc, args, config):
    if args.solver == "bnb":
        return solve(sc, config)
    if args.solver == "bruteforce":
        return solve_bruteforce(sc, config)
    placement = greedy_warmstart(sc, config)
    if placement is None:
        raise Infeasible("greedy construction reached a dead end")
    obj = derive_quantities(placement, epsilon=config.epsilon).objective
    return SolveReport(placement, obj, False, 0, 0.0, [(0.0, obj)], "greedy")


def _solve_into(sc, args, config, outdir: Path, sweep_value=""):
    """Solve once and write every artifact into outdir; returns (exit code, metrics or None)."""
    outdir.mkdir(parents=True, exist_ok=True)
    io.save_scenario(sc, outdir / "scenario.json")
    try:
        report = _run_solver(sc, args, config)
    except InvalidScenario as e:
        print("scenario is invalid:")
        _print_violations(e.violations)
        return VIOLATION, None
    except Infeasible as e:
        print(f"infeasible: {e}")
        return INFEASIBLE, None
    except TimeoutNoIncumbent as e:
        print(f"time limit reached without a feasible placement: {e}")
        return TIMEOUT, None
    except SpaceTooLarge as e:
        print(f"search space too large for brute force: {e}")
        return TOO_LARGE, None
    placement = report.best_placement
    check = check_placement(placement, epsilon=config.epsilon)
    io.write_placement(placement, outdir / "placement.json", check.ok, check.violations)
    bundle = compute_metrics(placement, report.objective)
    io.dump_json(io.report_to_dict(report, {
        "seed": sc.seed,
        "time_limit": config.time_limit,
        "node_limit": config.node_limit,
        "toggles": {"exposure": sc.toggles.exposure, "max_traffic": sc.toggles.max_traffic},
        "weights": {"capacity": sc.weights.capacity, "delay": sc.weights.delay},
        "activated_instances": bundle.activated_instances,
    }), outdir / "report.json")
    write_metrics(bundle, outdir, sweep_value)
    print(f"{report.status}: objective={report.objective!r} instances={bundle.activated_instances} "
          f"exposed_first_vnf={bundle.exposed_procedures_first_vnf} "
          f"exposed_any_shared={bundle.exposed_procedures_any_shared} nodes={report.nodes_explored}")
    return (OK if check.ok else VIOLATION), bundle


def cmd_validate(args) -> int:
    if args.path:
        args.scenario = args.path
    sc, _ = _load(args)
    try:
        problems = validate_scenario(sc)
    except Exception as e:  # malformed references can surface while deriving structures
        print(f"cannot validate: {e}")
        return PARSE
    if problems:
        print(f"{len(problems)} violation(s):")
        _print_violations(problems)
        return VIOLATION
    print("ok")
    return OK


def cmd_solve(args) -> int:
    sc, _ = _load(args)
    code, _ = _solve_into(sc, args, _config(args), Path(args.out))
    return code


def cmd_sweep(args) -> int:
    sc, sweep = _load(args)
    if args.variable:
        if not args.values:
            raise UsageError("--variable needs --values")
        try:
            values = tuple(float(x) if "." in x else int(x) for x in args.values.split(","))
        except ValueError:
            raise UsageError(f"cannot parse --values {args.values!r}") from None
        sweep = SweepSpec(args.variable, values)
    if sweep is None:
        raise UsageError("this scenario has no built-in sweep; pass --variable and --values")
    problems = sweep.problems()
    if problems:
        raise UsageError("; ".join(problems))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, worst = [], OK
    for value, variant in apply_sweep(sc, sweep):
        tl = float(value) if sweep.variable == "time_limit" else None
        print(f"[{sweep.variable}={value}] ", end="")
        code, bundle = _solve_into(variant, args, _config(args, tl), out / f"{sweep.variable}={value}", value)
        worst = max(worst, code)
        if bundle is not None:
            rows.append(exposure_row(bundle, value))
        else:
            rows.append(dict.fromkeys(EXPOSURE_COLUMNS, None) | {"sweep_value": value})
    write_table(out / "exposure", EXPOSURE_COLUMNS, rows)
    return worst


def cmd_oracle_check(args) -> int:
    sc, _ = _load(args)
    config = _config(args)
    results = {}
    for name, fn in (("bnb", solve), ("bruteforce", solve_bruteforce)):
        try:
            results[name] = fn(sc, config)
        except Infeasible:
            results[name] = None
        except SpaceTooLarge as e:
            print(f"search space too large for brute force: {e}")
            return TOO_LARGE
        except TimeoutNoIncumbent as e:
            print(f"time limit reached without a feasible placement: {e}")
            return TIMEOUT
        except InvalidScenario as e:
            print("scenario is invalid:")
            _print_violations(e.violations)
            return VIOLATION
    a, b = results["bnb"], results["bruteforce"]
    if a is None and b is None:
        print("match: both solvers report infeasible")
        return OK
    if a is not None and b is not None:
        tol = ORACLE_RTOL * max(1.0, abs(b.objective))
        if abs(a.objective - b.objective) <= tol:
            print(f"match: objective={b.objective!r}")
            return OK
    print("MISMATCH")
    for name, r in results.items():
        if r is None:
            print(f"  {name}: infeasible")
        else:
            print(f"  {name}: objective={r.objective!r}")
            print("    gamma: " + ", ".join(map(str, sorted(r.best_placement.gamma))))
            if args.out:
                Path(args.out).mkdir(parents=True, exist_ok=True)
                io.write_placement(r.best_placement, Path(args.out) / f"{name}_placement.json", True)
    return VIOLATION


def cmd_export(args) -> int:
    sc, _ = _load(args)
    io.save_scenario(sc, args.out)
    print(f"wrote {args.out}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help=f"built-in scenario: {', '.join(PRESETS)}")
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--seed", type=int, help="seed for the service-rate draw of a preset")
    common.add_argument("--exposure", choices=("on", "off"))
    common.add_argument("--max-traffic", choices=("on", "off"))
    common.add_argument("--w-cap", type=float, help="capacity weight in the objective")
    common.add_argument("--w-delay", type=float, help="delay weight in the objective")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--time-limit", type=float, default=SolverConfig.time_limit, help="seconds")
    search.add_argument("--node-limit", type=int, help="deterministic cap on explored search nodes")
    search.add_argument("--solver", choices=("bnb", "bruteforce", "greedy"), default="bnb")
    search.add_argument("--bound", choices=("default", "none", "inflated"), default="default",
                        help=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="slice-guard", description="Secure VNF placement for network slices.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", parents=[common], help="check a scenario for invariant violations")
    p.add_argument("path", nargs="?")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("solve", parents=[common, search], help="solve one scenario and write results")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("sweep", parents=[common, search], help="solve one variant per sweep value")
    p.add_argument("--variable", choices=SWEEP_VARIABLES)
    p.add_argument("--values", help="comma-separated, monotone")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("oracle-check", parents=[common, search], help="compare branch and bound with brute force")
    p.add_argument("--out", help="where to dump both placements on a mismatch")
    p.set_defaults(func=cmd_oracle_check)
    p = sub.add_parser("export", parents=[common], help="write a preset as a scenario JSON file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return PARSE if e.code else OK
    try:
        _threads()
        return args.func(args)
    except (UsageError, io.ScenarioFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return PARSE


if __name__ == "__main__":
    sys.exit(main())
