# policy.py
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Tuple, Type

from MFMP.errors import InvalidArgumentError
from MFMP.task import Task, TaskSize

from .instances import AssignmentOption


@dataclass
class DispatchConfig:
    """
    Dispatch parameters. Waiting times are per load and per unload, in minutes;
    ``penalty_window_y_min`` = 0 switches the traffic penalty off.
    """

    waiting_fixed_min: int = 30
    waiting_modular_min: int = 5
    penalty_window_y_min: int = 0
    penalty_rate: float = 0.001
    time_weight: float = 0.0
    task_order: str = "edf"
    fleet_policy: str = "cheapest_first"
    bundling: str = "greedy"

    def __post_init__(self) -> None:
        for name in (
            "waiting_fixed_min",
            "waiting_modular_min",
            "penalty_window_y_min",
            "penalty_rate",
            "time_weight",
        ):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(
                    f"DispatchConfig.{name} must be >= 0, got {getattr(self, name)}"
                )
        _lookup(TASK_ORDERS, self.task_order, "task_order")
        _lookup(FLEET_POLICIES, self.fleet_policy, "fleet_policy")
        _lookup(BUNDLING_POLICIES, self.bundling, "bundling")


class TaskOrderPolicy(ABC):
    """Decides which released task the dispatcher handles next."""

    name: str = ""

    @abstractmethod
    def priority(self, task: Task) -> Tuple:
        ...


class EarliestDeadlineFirst(TaskOrderPolicy):
    name = "edf"

    def priority(self, task: Task) -> Tuple:
        return (task.earliest_start, task.latest_completion, task.id)


class ReleaseOrder(TaskOrderPolicy):
    name = "fifo"

    def priority(self, task: Task) -> Tuple:
        return (task.earliest_start, task.id)


class FleetPolicy(ABC):
    """
    Ranks the assignment options of a task; the lowest key wins. Among options
    on units of one type and freshness, keys must order by start, then
    deployment order, then id: the engine keeps only the first such option.
    """

    name: str = ""

    @abstractmethod
    def rank(self, option: AssignmentOption) -> Tuple:
        ...


class CheapestCompatibleFirst(FleetPolicy):
    """
    Units already in service before fresh ones, then the cheapest compatible
    type, the earliest start, deployment order and id.
    """

    name = "cheapest_first"

    def rank(self, option: AssignmentOption) -> Tuple:
        v = option.vehicle
        return (
            v.fresh,
            option.cost,
            option.start,
            v.deploy_seq if v.deploy_seq is not None else 0,
            v.id,
        )


class EarliestStartFirst(FleetPolicy):
    name = "earliest_start"

    def rank(self, option: AssignmentOption) -> Tuple:
        v = option.vehicle
        return (
            option.start,
            v.fresh,
            option.cost,
            v.deploy_seq if v.deploy_seq is not None else 0,
            v.id,
        )


class BundlingPolicy(ABC):
    """Picks a pending task to ride along on the trip chosen for a medium task, if any."""

    name: str = ""

    @abstractmethod
    def partner(
        self,
        task: Task,
        pending: Iterable[Task],
        shares_trip: Callable[[Task, Task], bool],
    ) -> Optional[Task]:
        ...


class GreedyBundling(BundlingPolicy):
    """
    Pairs a medium task with the pending medium task of the same type and
    origin/destination whose deadline comes first, provided the chosen vehicle
    has room for it and a common start fits both windows.
    """

    name = "greedy"

    def partner(self, task, pending, shares_trip):
        if task.size is not TaskSize.MEDIUM:
            return None
        matches = [
            other
            for other in pending
            if other.id != task.id
            and other.size is TaskSize.MEDIUM
            and other.task_type is task.task_type
            and other.origin == task.origin
            and other.destination == task.destination
            and shares_trip(task, other)
        ]
        if not matches:
            return None
        return min(matches, key=lambda t: (t.latest_completion, t.earliest_start, t.id))


class NoBundling(BundlingPolicy):
    name = "none"

    def partner(self, task, pending, shares_trip):
        return None


TASK_ORDERS: Dict[str, Type[TaskOrderPolicy]] = {
    cls.name: cls for cls in (EarliestDeadlineFirst, ReleaseOrder)
}
FLEET_POLICIES: Dict[str, Type[FleetPolicy]] = {
    cls.name: cls for cls in (CheapestCompatibleFirst, EarliestStartFirst)
}
BUNDLING_POLICIES: Dict[str, Type[BundlingPolicy]] = {
    cls.name: cls for cls in (GreedyBundling, NoBundling)
}


def _lookup(registry: Dict[str, type], name: str, field_name: str) -> type:
    try:
        return registry[name]
    except KeyError:
        raise InvalidArgumentError(
            f"Unknown {field_name} policy {name!r}, must be one of {', '.join(sorted(registry))}"
        ) from None


def policies_for(cfg: DispatchConfig) -> Tuple[TaskOrderPolicy, FleetPolicy, BundlingPolicy]:
    return (
        _lookup(TASK_ORDERS, cfg.task_order, "task_order")(),
        _lookup(FLEET_POLICIES, cfg.fleet_policy, "fleet_policy")(),
        _lookup(BUNDLING_POLICIES, cfg.bundling, "bundling")(),
    )
