# instances.py
from bisect import bisect_right, insort
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from MFMP.fleet import ModuleType, VehicleType


@dataclass
class ModuleInstance:
    """
    A live module. It is fresh until first used; after each delivery it is
    parked at the task origin, free from the completion time on. ``owner`` is
    the motive unit that last carried it, until another unit takes it.
    """

    id: int
    module_type: ModuleType
    node: Optional[int] = None
    free_at: int = 0
    owner: Optional[int] = None

    @property
    def fresh(self) -> bool:
        return self.node is None

    @property
    def label(self) -> str:
        return f"{self.module_type.id}-{self.id:03d}"

    def __repr__(self):
        return (
            f"ModuleInstance(id={self.id}, type='{self.module_type.id}', node={self.node}, "
            f"free_at={self.free_at}, owner={self.owner})"
        )


@dataclass
class VehicleInstance:
    """
    A live vehicle or motive unit. A fresh vehicle has no position yet and can
    take its first task anywhere; afterwards it sits at the origin of its last task.
    ``module`` is the module a motive unit last carried, while nobody else took it.
    """

    id: int
    vehicle_type: VehicleType
    node: Optional[int] = None
    free_at: int = 0
    deploy_seq: Optional[int] = None
    module: Optional[ModuleInstance] = None
    trips: int = 0

    @property
    def fresh(self) -> bool:
        return self.node is None

    @property
    def label(self) -> str:
        return f"{self.vehicle_type.id}-{self.id:03d}"

    def __repr__(self):
        return (
            f"VehicleInstance(id={self.id}, type='{self.vehicle_type.id}', node={self.node}, "
            f"free_at={self.free_at}, module={self.module.label if self.module else None})"
        )


class TrafficLog:
    """Per node, the sorted timestamps at which any vehicle crossed it."""

    def __init__(self, node_count: int):
        self._crossings: Dict[int, List[int]] = {v: [] for v in range(node_count)}

    def record(self, node: int, time: int) -> None:
        insort(self._crossings[node], time)

    def record_route(self, route: Sequence[int], departure: int, edge_minutes: int) -> int:
        for hop, node in enumerate(route):
            self.record(node, departure + hop * edge_minutes)
        return len(route)

    def count(self, node: int, now: int, window: int) -> int:
        """Crossings in the half-open window (now - window, now]."""
        if window <= 0:
            return 0
        times = self._crossings[node]
        return bisect_right(times, now) - bisect_right(times, now - window)

    def crossings(self, node: int) -> Tuple[int, ...]:
        return tuple(self._crossings[node])

    def total(self) -> int:
        return sum(len(times) for times in self._crossings.values())

    def __repr__(self):
        return f"TrafficLog(nodes={len(self._crossings)}, crossings={self.total()})"


@dataclass(frozen=True)
class Trip:
    """
    One committed vehicle trip: optional deadhead to the origin, loaded route,
    and the empty return to the origin. ``busy_from``/``busy_until`` bound the
    whole vehicle commitment. ``window_arrival`` is ``start`` plus the route
    minutes, the instant checked against the task window; the vehicle reaches
    the destination one waiting time later.
    """

    trip_id: int
    task_ids: Tuple[int, ...]
    vehicle_id: int
    vehicle_label: str
    module_id: Optional[int]
    route: Tuple[int, ...]
    deadhead: Tuple[int, ...]
    return_route: Tuple[int, ...]
    busy_from: int
    start: int
    window_arrival: int
    completion: int
    busy_until: int
    penalty: float = 0.0

    @property
    def node_crossings(self) -> int:
        return len(self.route) + len(self.deadhead) + len(self.return_route)


@dataclass(frozen=True)
class TaskRecord:
    """Where and when one task was served. ``window_arrival`` as in ``Trip``."""

    task_id: int
    trip_id: int
    vehicle_id: int
    module_id: Optional[int]
    route: Tuple[int, ...]
    start: int
    window_arrival: int
    completion: int
    bundled_with: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "trip_id": self.trip_id,
            "vehicle_id": self.vehicle_id,
            "module_id": self.module_id,
            "route": list(self.route),
            "start": self.start,
            "window_arrival": self.window_arrival,
            "completion": self.completion,
            "bundled_with": self.bundled_with,
        }


@dataclass
class AssignmentOption:
    """
    A way to serve a task group: the vehicle, the module it will carry and
    where that module comes from, and the resulting service start.
    """

    vehicle: VehicleInstance
    start: int
    departure: int
    cost: float
    module: Optional[ModuleInstance] = None
    module_source: Optional[str] = None
    reconfigure: bool = False
