# runner.py
import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Set, Tuple

import numpy as np

from MFMP.fleet import FleetMode, catalog_for
from MFMP.network import NetworkKind, build_network
from MFMP.task import generate_scenario
from runtime.solver import best_cost, evolve
from runtime.tracer import LogColors

from .plan import MODE_ORDER, TOPOLOGY_ORDER, CellSpec, ExperimentPlan, format_value, solver_seed

CSV_COLUMNS = [
    "topology",
    "fleet_mode",
    "sweep_value",
    "replicate_seed",
    "F",
    "diversity",
    "lane",
    "task_count",
    "runtime_ms",
    "error",
]

WORKERS_ENV = "MODFLEET_WORKERS"


@dataclass(frozen=True)
class ResultRow:
    topology: str
    fleet_mode: str
    sweep_value: str
    replicate_seed: int
    F: float = math.nan
    diversity: float = math.nan
    lane: float = math.nan
    task_count: int = 0
    runtime_ms: int = 0
    error: str = ""

    def key(self) -> Tuple[str, str, str, str]:
        return (self.topology, self.fleet_mode, self.sweep_value, str(self.replicate_seed))

    def sort_key(self) -> Tuple:
        return (
            TOPOLOGY_ORDER.index(NetworkKind(self.topology)),
            MODE_ORDER.index(FleetMode(self.fleet_mode)),
            float(self.sweep_value),
            self.replicate_seed,
        )

    def to_csv(self) -> List[str]:
        if self.error:
            metrics = ["", "", "", ""]
        else:
            metrics = [repr(self.F), repr(self.diversity), repr(self.lane), str(self.task_count)]
        return [
            self.topology,
            self.fleet_mode,
            self.sweep_value,
            str(self.replicate_seed),
            *metrics,
            str(self.runtime_ms),
            self.error,
        ]

    @staticmethod
    def from_csv(record: dict) -> "ResultRow":
        error = record.get("error", "") or ""
        return ResultRow(
            topology=record["topology"],
            fleet_mode=record["fleet_mode"],
            sweep_value=record["sweep_value"],
            replicate_seed=int(record["replicate_seed"]),
            F=float(record["F"]) if not error else math.nan,
            diversity=float(record["diversity"]) if not error else math.nan,
            lane=float(record["lane"]) if not error else math.nan,
            task_count=int(record["task_count"]) if not error else 0,
            runtime_ms=int(record["runtime_ms"] or 0),
            error=error,
        )


def run_cell(plan: ExperimentPlan, cell: CellSpec) -> ResultRow:
    """Builds the replicate's network and scenario, evolves a fleet and keeps the cheapest member."""
    started = time.perf_counter()
    base = dict(
        topology=cell.topology.value,
        fleet_mode=cell.mode.value,
        sweep_value=format_value(cell.sweep_value),
        replicate_seed=cell.replicate_seed,
    )
    try:
        rng = np.random.default_rng(cell.replicate_seed)
        graph = build_network(cell.topology, plan.node_count, rng, sw2_bias=plan.sw2_bias)
        scenario = generate_scenario(
            plan.scenario_config_for(cell.sweep_value, cell.replicate_seed), graph, rng
        )
        solver_cfg = replace(
            plan.solver, seed=solver_seed(cell.replicate_seed, cell.mode, cell.value_index)
        )
        archive = evolve(
            scenario,
            catalog_for(cell.mode, plan.costs),
            plan.dispatch_config_for(cell.sweep_value),
            solver_cfg,
        )
        best = best_cost(archive)
    except Exception as e:
        return ResultRow(**base, error=f"{type(e).__name__}: {e}".replace("\n", " "))

    elapsed = int((time.perf_counter() - started) * 1000) if plan.record_runtime else 0
    return ResultRow(
        **base,
        F=best.objectives.F,
        diversity=best.objectives.diversity,
        lane=best.objectives.lane,
        task_count=len(scenario.tasks),
        runtime_ms=elapsed,
    )


def read_rows(path: Path) -> List[ResultRow]:
    if not path.exists() or path.stat().st_size == 0:
        return []
    with path.open(newline="") as f:
        return [ResultRow.from_csv(record) for record in csv.DictReader(f)]


class ResultWriter:
    """The single writer of a results CSV: appends rows as they finish, sorts on finalize."""

    def __init__(self, path: Path):
        self.path = path
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not self.path.exists() or self.path.stat().st_size == 0
        self._file = self.path.open("a", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        if fresh:
            self._writer.writerow(CSV_COLUMNS)
            self._file.flush()

    def write(self, row: ResultRow) -> None:
        self._writer.writerow(row.to_csv())
        self._file.flush()

    def close(self) -> None:
        self._file.close()

    def finalize(self) -> List[ResultRow]:
        """Rewrites the file sorted by key; a successful row replaces an earlier failed one."""
        self.close()
        latest = {}
        for row in read_rows(self.path):
            if row.key() in latest and not latest[row.key()].error and row.error:
                continue
            latest[row.key()] = row
        rows = sorted(latest.values(), key=ResultRow.sort_key)
        with self.path.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            writer.writerows(row.to_csv() for row in rows)
        return rows


def resolve_workers(plan: ExperimentPlan) -> int:
    """MODFLEET_WORKERS, when set, takes precedence over the plan's worker count."""
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            _log(f"Ignoring {WORKERS_ENV}={env!r}: not an integer", LogColors.WARNING)
    return plan.workers


def _log(message: str, color: str = None):
    prefix = "(Harness) "
    if color:
        print(f"{color}{prefix}{message}")
    else:
        print(f"{prefix}{message}")


def pending_cells(plan: ExperimentPlan, done: Set[Tuple[str, str, str, str]]) -> List[CellSpec]:
    return [cell for cell in plan.cells() if cell.key() not in done]


def run_experiment(
    plan: ExperimentPlan, out_path: Path, verbose: bool = True
) -> List[ResultRow]:
    """
    Runs every cell of the plan not already present (without error) in
    ``out_path`` and returns the complete, sorted table.
    """
    out_path = Path(out_path)
    done = {row.key() for row in read_rows(out_path) if not row.error}
    cells = pending_cells(plan, done)
    workers = resolve_workers(plan)
    if verbose:
        _log(
            f"{plan.name}: {len(cells)} of {plan.cell_count} cells to run on {workers} worker(s)",
            LogColors.HEADER,
        )

    writer = ResultWriter(out_path)
    try:
        for finished, row in enumerate(_execute(plan, cells, workers), start=1):
            writer.write(row)
            if verbose:
                status = f"error {row.error}" if row.error else f"F={row.F:.4f}"
                color = LogColors.ERROR if row.error else LogColors.DEFAULT
                _log(
                    f"[{finished}/{len(cells)}] {row.topology}/{row.fleet_mode} "
                    f"{plan.sweep.value}={row.sweep_value} seed {row.replicate_seed}: {status}",
                    color,
                )
    finally:
        rows = writer.finalize()
    if verbose:
        failed = sum(1 for r in rows if r.error)
        _log(
            f"{plan.name}: {len(rows) - failed} rows written to {out_path}"
            + (f", {failed} failed" if failed else ""),
            LogColors.WARNING if failed else LogColors.SUCCESS,
        )
    return rows


def _execute(plan: ExperimentPlan, cells: List[CellSpec], workers: int) -> Iterable[ResultRow]:
    if workers <= 1 or len(cells) <= 1:
        for cell in cells:
            yield run_cell(plan, cell)
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = {ex.submit(run_cell, plan, cell): cell for cell in cells}
        for fut in as_completed(futures):
            yield fut.result()
