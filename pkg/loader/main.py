# main.py
import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import colorama
import numpy as np

from experiments.charts import render_charts
from experiments.plan import ExperimentPlan, experiment1_plan, experiment2_plan
from experiments.runner import run_experiment
from experiments.summary import load_results, summarize, write_summary
from experiments.trends import trend_checks
from MFMP.errors import ModFleetError
from MFMP.fleet import acquisition_cost, diversity, lane_meters
from MFMP.network import NetworkKind, build_network, network_statistics, traffic
from MFMP.task import ScenarioConfig, generate_scenario
from runtime.engine import Engine
from runtime.policy import DispatchConfig
from runtime.solver import SolverConfig, best_cost, evolve
from runtime.tracer import LogColors

from .hydrator import (
    Hydrator,
    archive_document,
    graph_document,
    hydrate_plan,
    plan_document,
    read_json,
    scenario_document,
    write_json,
)
from .reporter import Reporter

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
PLAN_FILE = "plan.json"


def _emit(document, out: Optional[str]) -> None:
    if out:
        write_json(Path(out), document)
        print(f"{LogColors.SUCCESS}Wrote {out}")
    else:
        print(json.dumps(document, indent=2))


def _optional_config(hydrator: Hydrator, cls, path: Optional[str]):
    return hydrator.config(cls, read_json(Path(path))) if path else cls()


def cmd_gen_network(args) -> int:
    rng = np.random.default_rng(args.seed)
    g = build_network(NetworkKind.from_text(args.kind), args.nodes, rng, sw2_bias=args.sw2_bias)
    _emit(graph_document(g), args.out)
    return 0


def cmd_metrics(args) -> int:
    metrics = traffic(Hydrator().graph(read_json(Path(args.graph))))
    print("char_path_length,max_traffic")
    print(f"{metrics.char_path_length!r},{metrics.max_traffic!r}")
    return 0


def cmd_table1(args) -> int:
    rows = [
        network_statistics(kind, args.nodes, args.replicates, args.seed, sw2_bias=args.sw2_bias)
        for kind in NetworkKind
    ]
    Reporter().table1(rows)
    return 0


def cmd_gen_scenario(args) -> int:
    hydrator = Hydrator()
    g = hydrator.graph(read_json(Path(args.graph)))
    cfg = _optional_config(hydrator, ScenarioConfig, args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    scenario = generate_scenario(cfg, g)
    if args.verbose:
        Reporter().scenario(scenario)
    _emit(scenario_document(scenario), args.out)
    return 0


def cmd_objectives(args) -> int:
    hydrator = Hydrator()
    cat = hydrator.catalog(read_json(Path(args.catalog)))
    mix = hydrator.mix(read_json(Path(args.mix)), cat)
    print("F,diversity,lane")
    print(f"{acquisition_cost(mix, cat)!r},{diversity(mix)!r},{lane_meters(mix, cat)!r}")
    return 0


def cmd_simulate(args) -> int:
    hydrator = Hydrator()
    scenario = hydrator.scenario(read_json(Path(args.scenario)))
    cat = hydrator.catalog(read_json(Path(args.catalog)))
    mix = hydrator.mix(read_json(Path(args.mix)), cat)
    dispatch = _optional_config(hydrator, DispatchConfig, args.dispatch)

    engine = Engine(scenario, mix, cat, dispatch, verbose=args.verbose)
    result = engine.run()
    Reporter().schedule(result)
    if args.gantt:
        Path(args.gantt).write_text(engine.gantt() + "\n")
        print(f"{LogColors.SUCCESS}Wrote {args.gantt}")
    _emit(result.to_dict(), args.out)
    return 0 if result.feasible else 2


def cmd_optimize(args) -> int:
    hydrator = Hydrator()
    scenario = hydrator.scenario(read_json(Path(args.scenario)))
    cat = hydrator.catalog(read_json(Path(args.catalog)))
    dispatch = _optional_config(hydrator, DispatchConfig, args.dispatch)
    solver = _optional_config(hydrator, SolverConfig, args.solver)

    archive = evolve(scenario, cat, dispatch, solver, verbose=args.verbose)
    Reporter().archive(archive)
    _emit(archive_document(archive), args.out)
    print(f"{LogColors.INFO}Best cost F = {best_cost(archive).objectives.F!r}")
    return 0


def _experiment(args, default_plan) -> int:
    plan: ExperimentPlan = hydrate_plan(read_json(Path(args.plan))) if args.plan else default_plan(
        preset=args.preset, master_seed=args.seed
    )
    if args.workers is not None:
        plan = replace(plan, workers=args.workers)
    if args.no_runtime:
        plan = replace(plan, record_runtime=False)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / PLAN_FILE, plan_document(plan))
    rows = run_experiment(plan, out_dir / RESULTS_FILE, verbose=not args.quiet)
    return 0 if all(not r.error for r in rows) else 2


def cmd_exp1(args) -> int:
    return _experiment(args, experiment1_plan)


def cmd_exp2(args) -> int:
    return _experiment(args, experiment2_plan)


def cmd_report(args) -> int:
    out_dir = Path(args.dir)
    plan_path = out_dir / PLAN_FILE
    plan = hydrate_plan(read_json(plan_path)) if plan_path.exists() else ExperimentPlan()
    summary = summarize(load_results(out_dir / RESULTS_FILE))
    write_summary(summary, out_dir / SUMMARY_FILE)

    reporter = Reporter()
    reporter.summary(summary, plan.name)
    reporter.trends(trend_checks(summary, plan.sweep))
    chart = render_charts(summary, out_dir / f"{plan.name}.svg", f"{plan.name}: F vs {plan.sweep.value}", plan.sweep.value)
    if chart:
        print(f"{LogColors.SUCCESS}Wrote {chart}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modfleet", description="Modular fleet mix toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-network", help="generate a ring, sw1 or sw2 network")
    p.add_argument("--kind", required=True, choices=[k.value for k in NetworkKind])
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sw2-bias", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_network)

    p = sub.add_parser("metrics", help="print L and B of a network as CSV")
    p.add_argument("graph")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("table1", help="replicate means of L and B for ring, sw1 and sw2")
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sw2-bias", type=float, default=0.5)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("gen-scenario", help="sample tasks over a network")
    p.add_argument("--graph", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_gen_scenario)

    p = sub.add_parser("objectives", help="print F (acquisition), diversity and lane meters of a mix")
    p.add_argument("--mix", required=True)
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=cmd_objectives)

    p = sub.add_parser("simulate", help="dispatch a scenario with a fixed fleet mix")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mix", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--dispatch")
    p.add_argument("--out")
    p.add_argument("--gantt")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="evolve a Pareto archive of fleet mixes")
    p.add_argument("--scenario", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--dispatch")
    p.add_argument("--solver")
    p.add_argument("--out")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_optimize)

    for name, func, text in (
        ("exp1", cmd_exp1, "penalty window sweep"),
        ("exp2", cmd_exp2, "flexibility sweep"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--plan")
        p.add_argument("--preset", default="desk", choices=["desk", "full"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int)
        p.add_argument("--no-runtime", action="store_true", help="write runtime_ms as 0")
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="summarize, check trends and chart an experiment directory")
    p.add_argument("dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parses the command line and runs one subcommand."""
    colorama.init(autoreset=True)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModFleetError, FileNotFoundError) as ex:
        print(f"{LogColors.ERROR}Error: {ex}")
        print(f"{LogColors.ERROR}Process aborted.")
        return 1
    finally:
        colorama.deinit()


if __name__ == "__main__":
    sys.exit(main())
