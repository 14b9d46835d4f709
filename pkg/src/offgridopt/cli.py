"""Command-line entry point.

Subcommands: ``simulate``, ``size``, ``dispatch``, ``pareto``, ``sweep``,
``breakeven``, ``bench``.  Every run writes ``result.json`` (embedding the
fully resolved config and seed, so reruns are reproducible from the result
file alone) plus the CSV artifacts of the module it drives.  Exit status is
0 iff the result document reports success.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dispatch as dispatch_mod
from . import economics, solvers, sweeps
from .config import SCHEMA_VERSION, build_config, build_context, load_config
from .economics import Weights, weighted_objective
from .errors import ConfigError, InputDataError
from .seeding import substream_seed
from .simulate import Design, simulate_year


def _parse_design(text: str) -> Design:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise InputDataError("--design expects 'n_s,n_w,e_b_init'")
    return Design(round(parts[0]), round(parts[1]), parts[2])


def _parse_weights(text: str):
    return tuple(float(p) for p in text.split(","))


def _objective_summary(sim) -> dict:
    o = sim.objectives
    return {
        "lcoe_norm": o.lcoe_norm, "em_norm": o.em_norm, "dpsp": o.dpsp,
        "repg": o.repg, "one_minus_ref": o.one_minus_ref,
        "dg_online_hours": sim.dg_online_hours,
        "dg_starts": sim.dg_starts, "dg_stops": sim.dg_stops,
        "battery_cycles": sim.battery_cycles,
        "dg_energy_kwh": sim.dg_energy_kwh,
        "res_energy_kwh": sim.res_energy_kwh,
        "dump_kwh": sim.dump_kwh, "lost_kwh": sim.lost_kwh,
        "load_kwh": sim.load_kwh, "emissions_kg": sim.emissions_kg,
        "cost_breakdown": sim.cost.as_dict(),
    }


def _write_result(out_dir: Path, command: str, seed: int, config, results: dict,
                  status: str = "ok", message: str = "") -> Path:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "message": message,
        "seed": seed,
        "config": config.resolved() if config is not None else None,
        "results": results,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "result.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value)}")


def cmd_simulate(args, config) -> dict:
    ctx = build_context(config, args.seed)
    design = _parse_design(args.design)
    sim = simulate_year(design, ctx)
    results = {
        "design": list(design.as_vector()),
        "weighted_objective": weighted_objective(sim.objectives, config.weights),
        **_objective_summary(sim),
    }
    if args.trace:
        sim.write_trace_csv(Path(args.out) / "trace.csv")
        results["trace_csv"] = "trace.csv"
    return results


def _sizing_problem(config, seed):
    ctx = build_context(config, seed)
    weights = config.weights

    def make_design(x):
        # integer mode: unit counts; continuous mode: total rated kW
        if config.sizing["integer_counts"]:
            return Design(round(x[0]), round(x[1]), float(x[2]))
        return Design.from_capacities(float(x[0]), float(x[1]), float(x[2]),
                                      config.pv, config.wind)

    def objective(x):
        return weighted_objective(simulate_year(make_design(x), ctx).objectives,
                                  weights)

    return ctx, objective, config.search_space(), make_design


def cmd_size(args, config) -> dict:
    if args.weights:
        config.weights = Weights(_parse_weights(args.weights))
    ctx, objective, space, make_design = _sizing_problem(config, args.seed)
    solver_name = args.solver or config.sizing["solver"]
    if solver_name not in solvers.SOLVERS:
        raise InputDataError(f"unknown solver {solver_name!r}")
    kwargs = {"max_evals": args.max_evals or config.sizing["max_evals"],
              "seed": substream_seed(args.seed, "solver")}
    if solver_name == "pso":
        kwargs["swarm_size"] = config.sizing["swarm_size"]
    report = solvers.SOLVERS[solver_name](objective, space, **kwargs)
    design = make_design(report.best_point)
    sim = simulate_year(design, ctx)
    # deliberately no wall-clock fields: same seed => byte-identical result
    return {
        "solver": solver_name,
        "best_point": [float(v) for v in report.best_point],
        "best_design": list(design.as_vector()),
        "best_value": report.best_value,
        "evaluations": report.evaluations,
        **_objective_summary(sim),
    }


def cmd_dispatch(args, config) -> dict:
    ctx = build_context(config, args.seed)
    design = _parse_design(args.design)
    if args.weights:
        config.dispatch["weights"] = [float(v) for v in _parse_weights(args.weights)]
    weights4 = Weights(tuple(config.dispatch["weights"]))
    day = args.day if args.day is not None else config.dispatch["day"]
    dctx = dispatch_mod.day_context(
        ctx, design, day, weights4, dpsp_max=config.dispatch["dpsp_max"],
        generator=config.dispatch_generator())
    result = dispatch_mod.optimize_day(
        dctx, seed=substream_seed(args.seed, "solver"),
        max_patterns=config.dispatch["max_patterns"])
    out = Path(args.out)
    result.schedule.write_csv(out / "schedule.csv", dctx, result.evaluation)
    ev, rb = result.evaluation, result.rule_based_evaluation
    return {
        "day": day,
        "feasible": result.feasible,
        "message": result.message,
        "weighted_objective": ev.weighted,
        "summary_objective": ev.summary5,
        "rule_based_weighted_objective": rb.weighted,
        "coe_norm": ev.objectives.lcoe_norm,
        "em_norm": ev.objectives.em_norm,
        "dpsp": ev.dpsp,
        "repg": ev.objectives.repg,
        "ref": 1.0 - ev.objectives.one_minus_ref,
        "c_daily_usd": ev.c_daily,
        "violations": ev.violations,
        "schedule_csv": "schedule.csv",
    }


def cmd_pareto(args, config) -> dict:
    ctx = build_context(config, args.seed)
    space = config.search_space()

    def objectives(x):
        design = Design(round(x[0]), round(x[1]), float(x[2]))
        return simulate_year(design, ctx).objectives.as_array()

    front = solvers.pareto_front(objectives, space,
                                 population=args.population,
                                 generations=args.generations,
                                 seed=substream_seed(args.seed, "solver"))
    out = Path(args.out)
    import csv as _csv
    with open(out / "pareto.csv", "w", newline="\n", encoding="utf-8") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["n_s", "n_w", "e_b", "lcoe_norm", "em_norm", "dpsp",
                         "repg", "one_minus_ref"])
        for point, vals in front:
            writer.writerow([int(point[0]), int(point[1]), f"{point[2]:.3f}"]
                            + [f"{v:.6f}" for v in vals])
    return {"n_points": len(front), "pareto_csv": "pareto.csv"}


def cmd_sweep(args, config) -> dict:
    ctx = build_context(config, args.seed)
    if args.values:
        spec = sweeps.SweepSpec(args.parameter,
                                tuple(float(v) for v in args.values.split(",")))
    else:
        spec = sweeps.SweepSpec.default(args.parameter)
    rows = sweeps.run_sweep(
        spec, ctx, config.weights, config.search_space(),
        seed=substream_seed(args.seed, "solver"),
        max_evals=args.max_evals or config.sizing["max_evals"],
        swarm_size=config.sizing["swarm_size"], workers=args.workers)
    out = Path(args.out)
    sweeps.sweep_to_csv(rows, out / f"sweep_{args.parameter}.csv")
    return {
        "parameter": args.parameter,
        "values": list(spec.values),
        "statuses": [r.status for r in rows],
        "weighted_obj": [r.weighted_obj for r in rows],
        "sweep_csv": f"sweep_{args.parameter}.csv",
    }


def cmd_breakeven(args, config) -> dict:
    crf_value = economics.crf(economics.real_rate(config.fin),
                              config.fin.system_lifetime)
    extra = {}
    if args.tac is not None:
        tac, load_kwh = args.tac, args.load_kwh
        if load_kwh is None:
            raise InputDataError("--load-kwh is required with --tac")
    else:
        if not args.design:
            raise InputDataError("breakeven needs --tac/--load-kwh or --design")
        ctx = build_context(config, args.seed)
        sim = simulate_year(_parse_design(args.design), ctx)
        tac, load_kwh = sim.cost.tac, sim.load_kwh
        extra["cost_breakdown"] = sim.cost.as_dict()
    bed = economics.break_even_distance(
        tac, crf_value, load_kwh,
        config.breakeven["grid_lcoe_usd_per_kwh"],
        config.breakeven["extension_cost_usd_per_km"])
    return {"tac_usd": tac, "annual_load_kwh": load_kwh, "crf": crf_value,
            "grid_lcoe_usd_per_kwh": config.breakeven["grid_lcoe_usd_per_kwh"],
            "extension_cost_usd_per_km": config.breakeven["extension_cost_usd_per_km"],
            "break_even_distance_km": bed, **extra}


def cmd_bench(args, config) -> dict:
    _, objective, space, _ = _sizing_problem(config, args.seed)
    names = [s.strip() for s in args.solvers.split(",")]
    reports = solvers.solver_benchmark(
        objective, space, names, seed=substream_seed(args.seed, "solver"),
        max_evals=args.max_evals or config.sizing["max_evals"])
    out = Path(args.out)
    solvers.benchmark_to_csv(reports, out / "benchmark.csv")
    solvers.benchmark_to_json(reports, out / "benchmark.json")
    return {"table": [r.as_dict() for r in reports],
            "benchmark_csv": "benchmark.csv",
            "benchmark_json": "benchmark.json"}


COMMANDS = {
    "simulate": cmd_simulate,
    "size": cmd_size,
    "dispatch": cmd_dispatch,
    "pareto": cmd_pareto,
    "sweep": cmd_sweep,
    "breakeven": cmd_breakeven,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offgridopt",
        description="Design and dispatch of islanded hybrid microgrids.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="YAML config path (defaults apply if omitted)")
        p.add_argument("--seed", type=int, required=True, help="top-level run seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=1, help="worker pool size")

    p = sub.add_parser("simulate", help="hourly annual simulation of one design")
    common(p)
    p.add_argument("--design", required=True, help="n_s,n_w,e_b_init")
    p.add_argument("--trace", action="store_true", help="write hourly trace CSV")

    p = sub.add_parser("size", help="global sizing optimization")
    common(p)
    p.add_argument("--solver", default=None, choices=sorted(solvers.SOLVERS))
    p.add_argument("--max-evals", type=int, default=None)
    p.add_argument("--weights", default=None, help="w1,w2,w3,w4,w5 override")

    p = sub.add_parser("dispatch", help="day-ahead dispatch optimization")
    common(p)
    p.add_argument("--design", required=True, help="n_s,n_w,e_b_init")
    p.add_argument("--day", type=int, default=None)
    p.add_argument("--weights", default=None, help="w1,w2,w3,w4")

    p = sub.add_parser("pareto", help="multiobjective Pareto front of the sizing problem")
    common(p)
    p.add_argument("--population", type=int, default=36)
    p.add_argument("--generations", type=int, default=30)

    p = sub.add_parser("sweep", help="single-parameter sensitivity sweep")
    common(p)
    p.add_argument("--parameter", required=True, choices=sweeps.SWEEP_PARAMETERS)
    p.add_argument("--values", default=None, help="comma-separated override values")
    p.add_argument("--max-evals", type=int, default=None)

    p = sub.add_parser("breakeven", help="grid-extension break-even distance")
    common(p)
    p.add_argument("--tac", type=float, default=None, help="total annualized cost [$]")
    p.add_argument("--load-kwh", type=float, default=None, help="annual load [kWh]")
    p.add_argument("--design", default=None, help="simulate this design for TAC")

    p = sub.add_parser("bench", help="benchmark solvers on the sizing problem")
    common(p)
    p.add_argument("--solvers", default="pso,ga,sa,ps,ms")
    p.add_argument("--max-evals", type=int, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = None
    try:
        config = load_config(args.config) if args.config else build_config({})
        results = COMMANDS[args.command](args, config)
        _write_result(out_dir, args.command, args.seed, config, results)
        return 0
    except (InputDataError, ConfigError, OSError) as exc:
        _write_result(out_dir, args.command, args.seed, config, {},
                      status="error", message=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
