# tracer.py
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

from colorama import Fore

from .instances import AssignmentOption, Trip


class LogColors:
    """Color constants for logging."""

    HEADER = Fore.MAGENTA
    SUCCESS = Fore.GREEN
    ERROR = Fore.RED
    WARNING = Fore.YELLOW
    INFO = Fore.CYAN
    DEFAULT = Fore.LIGHTBLACK_EX


@dataclass
class LogEntry:
    """A structured entry for the simulation trace, stamped with simulation minutes."""

    time: int
    event_type: str
    details: Dict[str, Any]


class SimulationTracer:
    """Records key dispatch events to build a detailed history."""

    def __init__(self):
        self.history: List[LogEntry] = []

    def _log(self, time: int, event_type: str, details: Dict[str, Any]):
        self.history.append(LogEntry(time, event_type, details))

    def log_dispatch(self, trip: Trip):
        self._log(
            trip.start,
            "DISPATCH",
            {
                "tasks": trip.task_ids,
                "vehicle": trip.vehicle_label,
                "module_id": trip.module_id,
                "route": trip.route,
                "penalty": trip.penalty,
            },
        )

    def log_bundle(self, time: int, lead: int, partner: int, vehicle_label: str):
        self._log(time, "BUNDLE", {"tasks": (lead, partner), "vehicle": vehicle_label})

    def log_commission(self, time: int, task_id: int, vehicle_type: str, module_type: str):
        self._log(
            time,
            "COMMISSION",
            {"task": task_id, "vehicle_type": vehicle_type, "module_type": module_type},
        )

    def log_reconfigure(self, time: int, option: AssignmentOption, dropped: str, node: int):
        self._log(
            time,
            "RECONFIGURE",
            {
                "vehicle": option.vehicle.label,
                "module": option.module.label if option.module else None,
                "source": option.module_source,
                "dropped": dropped,
                "node": node,
            },
        )

    def log_unserved(self, time: int, task_id: int, reason: str):
        self._log(time, "UNSERVED", {"task": task_id, "reason": reason})

    def events(self, event_type: str) -> List[LogEntry]:
        return [entry for entry in self.history if entry.event_type == event_type]


class MermaidGanttGenerator:
    """Generates a Mermaid Gantt chart with one section per vehicle from the committed trips."""

    def __init__(self, trips: Sequence[Trip], title: str = "Fleet schedule"):
        self.trips = trips
        self.title = title

    def generate(self) -> str:
        by_vehicle: Dict[str, List[Trip]] = defaultdict(list)
        for trip in self.trips:
            by_vehicle[trip.vehicle_label].append(trip)

        lines = [
            "gantt",
            f"    title {self.title}",
            "    dateFormat X",
            "    axisFormat %s",
        ]
        for label in sorted(by_vehicle):
            lines.append(f"    section {label}")
            for trip in sorted(by_vehicle[label], key=lambda t: t.busy_from):
                tasks = "+".join(f"T{t}" for t in trip.task_ids)
                if trip.deadhead:
                    lines.append(
                        f"    {tasks} deadhead :done, d{trip.trip_id}, {trip.busy_from}, {trip.start}"
                    )
                # Mermaid can be picky with arrows in labels
                path = " ".join(str(v) for v in trip.route)
                lines.append(
                    f"    {tasks} [{path}] :active, t{trip.trip_id}, {trip.start}, {trip.completion}"
                )
                if trip.return_route:
                    lines.append(
                        f"    {tasks} return :r{trip.trip_id}, {trip.completion}, {trip.busy_until}"
                    )
        return "\n".join(lines)
