# reporter.py

from typing import Any, Iterable, List

import colorama
import pandas as pd

from experiments.trends import TrendCheck
from MFMP.fleet import FleetCatalog, FleetMix, acquisition_cost, diversity, lane_meters
from MFMP.network import Graph, NetworkMetrics, NetworkStatistics
from MFMP.task import Scenario, scenario_stats
from runtime.engine import ScheduleResult
from runtime.solver import ParetoArchive, best_cost


class Reporter:
    """Prints structured, readable reports of networks, schedules, archives and experiment summaries."""

    HEADER = colorama.Fore.CYAN
    PASS = colorama.Fore.GREEN
    FAIL = colorama.Fore.RED
    DEFAULT_COLOR = colorama.Fore.RESET
    INDENT_CYCLE = [
        colorama.Fore.BLUE,
        colorama.Fore.GREEN,
        colorama.Fore.MAGENTA,
        colorama.Fore.YELLOW,
    ]

    def __init__(self):
        self.indent_level = 0

    def _log(self, message: str, color: str = None):
        """Prints a message with the current indentation level and color."""
        if color is None:
            log_color = self.INDENT_CYCLE[self.indent_level % len(self.INDENT_CYCLE)]
        else:
            log_color = color

        print(f"{'  ' * self.indent_level}{log_color}{message}{self.DEFAULT_COLOR}")

    def _report_collection(self, title: str, collection: Iterable[Any], item_prefix: str = ""):
        """Generic helper to report a collection of items under a title."""
        items = list(collection)
        if not items:
            return
        self._log(f"{title}:")
        self.indent_level += 1
        for item in items:
            self._log(f"{item_prefix}{item}")
        self.indent_level -= 1

    def network(self, g: Graph, metrics: NetworkMetrics):
        self._log(f"Network {g}", self.HEADER)
        self.indent_level += 1
        self._log(f"Characteristic path length L = {metrics.char_path_length:.4f}")
        self._log(f"Highest traffic node B = {metrics.max_traffic:g}")
        self._report_collection(
            "Traffic per node",
            (f"{v}: {n}" for v, n in sorted(metrics.per_node_traffic.items())),
            item_prefix="- ",
        )
        self.indent_level -= 1

    def table1(self, rows: List[NetworkStatistics]):
        self._log("Network statistics:", self.HEADER)
        self.indent_level += 1
        for row in rows:
            self._log(
                f"{row.kind.value:<5} L={row.mean_char_path_length:.2f} (sd {row.std_char_path_length:.2f})  "
                f"B={row.mean_max_traffic:.1f} (sd {row.std_max_traffic:.1f})  n={row.replicates}"
            )
        self.indent_level -= 1

    def scenario(self, s: Scenario):
        stats = scenario_stats(s)
        self._log(f"{s}", self.HEADER)
        self.indent_level += 1
        self._log(f"{stats}")
        self._report_collection(
            "Tasks by class", (f"{k}: {v}" for k, v in stats.counts_by_class.items()), item_prefix="- "
        )
        self.indent_level -= 1

    def mix(self, mix: FleetMix, cat: FleetCatalog):
        self._log(f"{mix}", self.HEADER)
        self.indent_level += 1
        self._log(f"Acquisition cost: {acquisition_cost(mix, cat):.4f}")
        self._log(f"Diversity: {diversity(mix):.4f}")
        self._log(f"Lane meters: {lane_meters(mix, cat):.1f}")
        self.indent_level -= 1

    def schedule(self, result: ScheduleResult, limit: int = 20):
        self._log(f"{result}", self.PASS if result.feasible else self.FAIL)
        self.indent_level += 1
        self._log(f"Acquisition cost: {result.acquisition_cost:.4f}")
        self._log(f"Traffic penalty: {result.traffic_penalty_total:.4f}")
        self._log(f"Objective F: {result.objective_F:.4f}")
        self._log(f"Node crossings logged: {result.crossings}")
        if result.unserved_tasks:
            self._log(f"Unserved tasks: {list(result.unserved_tasks)}", self.FAIL)
        self._report_collection(
            f"Trips (first {min(limit, len(result.trips))} of {len(result.trips)})",
            (
                f"{'+'.join(f'T{t}' for t in trip.task_ids)} on {trip.vehicle_label}: "
                f"{' -> '.join(map(str, trip.route))} start {trip.start} done {trip.completion}"
                for trip in result.trips[:limit]
            ),
            item_prefix="- ",
        )
        self.indent_level -= 1

    def archive(self, archive: ParetoArchive):
        self._log(f"{archive}", self.HEADER)
        self.indent_level += 1
        ordered = sorted(archive.members, key=lambda m: (m.objectives.F, m.mix.key()))
        self._report_collection("Members", ordered, item_prefix="- ")
        if len(archive):
            self._log(f"Best cost: {best_cost(archive)!r}", self.PASS)
        self.indent_level -= 1

    def summary(self, summary: pd.DataFrame, title: str):
        self._log(f"{title} summary:", self.HEADER)
        self.indent_level += 1
        for line in summary.to_string(index=False, float_format=lambda x: f"{x:.4f}").splitlines():
            self._log(line, self.DEFAULT_COLOR)
        self.indent_level -= 1

    def trends(self, checks: List[TrendCheck]):
        self._log("Qualitative trends:", self.HEADER)
        self.indent_level += 1
        for check in checks:
            self._log(f"{check}", self.PASS if check.passed else self.FAIL)
        self.indent_level -= 1
