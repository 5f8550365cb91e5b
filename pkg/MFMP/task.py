# task.py
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from colorama import Fore

from .errors import InvalidArgumentError, TaskCapExceededError
from .network import Graph, longest_route_hops


class TaskType(Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"


class TaskSize(Enum):
    MEDIUM = "medium"
    HEAVY = "heavy"


class FlexibilityMode(Enum):
    ROUTE_RELATIVE = "route_relative"
    PROPORTIONAL = "proportional"


class StreamMode(Enum):
    GLOBAL = "global"
    PER_ORIGIN_NODE = "per_origin_node"


@dataclass(frozen=True)
class Task:
    """
    A typed, sized move from origin to destination.

    All times are integer minutes. The task may start service no earlier than
    ``earliest_start``; travel over the chosen route must end by
    ``latest_completion``.
    """

    id: int
    task_type: TaskType
    size: TaskSize
    origin: int
    destination: int
    earliest_start: int
    duration: int
    flexibility: int = 0

    def __post_init__(self) -> None:
        if self.origin == self.destination:
            raise InvalidArgumentError(
                f"Task {self.id}: origin and destination are both node {self.origin}"
            )
        if self.earliest_start < 0:
            raise InvalidArgumentError(
                f"Task {self.id}: earliest_start must be >= 0, got {self.earliest_start}"
            )
        if self.duration <= 0:
            raise InvalidArgumentError(
                f"Task {self.id}: duration must be > 0, got {self.duration}"
            )
        if self.flexibility < 0:
            raise InvalidArgumentError(
                f"Task {self.id}: flexibility must be >= 0, got {self.flexibility}"
            )

    @property
    def latest_start(self) -> int:
        return self.earliest_start + self.flexibility

    @property
    def latest_completion(self) -> int:
        return self.earliest_start + self.flexibility + self.duration

    def latest_start_for(self, route_minutes: int) -> int:
        """Latest service start that still lets a route of this length end on time."""
        return self.latest_completion - route_minutes

    @property
    def is_heavy(self) -> bool:
        return self.size is TaskSize.HEAVY

    def __str__(self) -> str:
        return (
            f"Task {self.id} ({self.task_type.value}/{self.size.value} "
            f"{self.origin}->{self.destination} @ {self.earliest_start})"
        )


@dataclass
class ScenarioConfig:
    """
    Sampling parameters for one problem instance.
    """

    edge_travel_min: int = 30
    inter_task_min: int = 5
    horizon_min: int = 720
    flexibility_mode: FlexibilityMode = FlexibilityMode.ROUTE_RELATIVE
    flexibility_alpha: float = 0.0
    stream_mode: StreamMode = StreamMode.PER_ORIGIN_NODE
    p_type1: float = 0.5
    p_heavy: float = 0.5
    seed: int = 0
    task_cap: int = 100_000

    def __post_init__(self) -> None:
        for name in ("edge_travel_min", "inter_task_min", "horizon_min"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(
                    f"ScenarioConfig.{name} must be >= 0, got {getattr(self, name)}"
                )
        if self.edge_travel_min == 0:
            raise InvalidArgumentError("ScenarioConfig.edge_travel_min must be > 0")
        if self.flexibility_alpha < 0:
            raise InvalidArgumentError(
                f"ScenarioConfig.flexibility_alpha must be >= 0, got {self.flexibility_alpha}"
            )
        for name in ("p_type1", "p_heavy"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidArgumentError(
                    f"ScenarioConfig.{name} must lie in [0, 1], got {getattr(self, name)}"
                )
        if self.task_cap < 1:
            raise InvalidArgumentError(f"ScenarioConfig.task_cap must be >= 1, got {self.task_cap}")

    def flexibility_for(self, duration: int) -> int:
        if self.flexibility_mode is FlexibilityMode.ROUTE_RELATIVE:
            # Slack comes from picking a route shorter than the longest one.
            return 0
        return int(self.flexibility_alpha * duration + 0.5)


@dataclass(frozen=True)
class Scenario:
    """
    A sampled mission: the network and its tasks sorted by earliest start.
    """

    graph: Graph
    tasks: Tuple[Task, ...]
    config: ScenarioConfig = field(default_factory=ScenarioConfig)

    def __post_init__(self) -> None:
        seen = set()
        for task in self.tasks:
            if task.id in seen:
                raise InvalidArgumentError(f"Duplicate task id {task.id} in scenario")
            seen.add(task.id)
            for node in (task.origin, task.destination):
                if not 0 <= node < self.graph.node_count:
                    raise InvalidArgumentError(f"{task} references node {node} outside {self.graph}")
        starts = [t.earliest_start for t in self.tasks]
        if starts != sorted(starts):
            raise InvalidArgumentError("Scenario tasks must be sorted by earliest_start")

    def task(self, task_id: int) -> Task:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise InvalidArgumentError(f"No task with id {task_id}")

    def __len__(self) -> int:
        return len(self.tasks)

    def __str__(self) -> str:
        return f"Scenario({len(self.tasks)} tasks on {self.graph})"


def generate_scenario(
    cfg: ScenarioConfig, g: Graph, rng: Optional[np.random.Generator] = None
) -> Scenario:
    """
    Samples task streams over a connected network.

    Each stream is a renewal process whose gaps are drawn uniformly from
    {0, ..., inter_task_min}; it runs until the horizon. Streams are either one
    global stream or one per origin node.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if g.node_count < 2:
        raise InvalidArgumentError(f"Scenarios need at least two nodes, got {g}")

    if cfg.stream_mode is StreamMode.PER_ORIGIN_NODE:
        stream_origins: List[Optional[int]] = list(g.nodes)
    else:
        stream_origins = [None]

    drafts = []
    truncated = False
    for stream_index, fixed_origin in enumerate(stream_origins):
        clock = 0
        while True:
            clock += int(rng.integers(0, cfg.inter_task_min + 1))
            if clock > cfg.horizon_min:
                break
            if len(drafts) >= cfg.task_cap:
                if cfg.inter_task_min > 0:
                    raise TaskCapExceededError(
                        f"Scenario exceeds the task cap of {cfg.task_cap} tasks"
                    )
                truncated = True
                break

            origin = fixed_origin if fixed_origin is not None else int(rng.integers(g.node_count))
            others = [v for v in g.nodes if v != origin]
            destination = others[int(rng.integers(len(others)))]
            task_type = TaskType.TYPE1 if rng.random() < cfg.p_type1 else TaskType.TYPE2
            size = TaskSize.HEAVY if rng.random() < cfg.p_heavy else TaskSize.MEDIUM
            drafts.append((clock, origin, stream_index, len(drafts), task_type, size, destination))

    if truncated:
        print(
            f"{Fore.YELLOW}(Scenario) inter_task_min=0 never advances the clock; "
            f"stopped at the task cap of {cfg.task_cap}"
        )

    drafts.sort(key=lambda d: (d[0], d[1], d[2], d[3]))
    tasks = []
    for task_id, (start, origin, _, _, task_type, size, destination) in enumerate(drafts):
        duration = longest_route_hops(g, origin, destination) * cfg.edge_travel_min
        tasks.append(
            Task(
                id=task_id,
                task_type=task_type,
                size=size,
                origin=origin,
                destination=destination,
                earliest_start=start,
                duration=duration,
                flexibility=cfg.flexibility_for(duration),
            )
        )
    return Scenario(graph=g, tasks=tuple(tasks), config=cfg)


@dataclass(frozen=True)
class ScenarioStats:
    task_count: int
    counts_by_class: Dict[str, int]
    mean_duration: float
    mean_flexibility: float
    max_duration: int

    def __str__(self) -> str:
        classes = ", ".join(f"{k}={v}" for k, v in self.counts_by_class.items())
        return (
            f"{self.task_count} tasks ({classes}); mean duration {self.mean_duration:.1f} min, "
            f"mean flexibility {self.mean_flexibility:.1f} min"
        )


def scenario_stats(s: Scenario) -> ScenarioStats:
    counts = Counter(f"{t.task_type.value}/{t.size.value}" for t in s.tasks)
    classes = {
        f"{tt.value}/{sz.value}": counts.get(f"{tt.value}/{sz.value}", 0)
        for tt in TaskType
        for sz in TaskSize
    }
    if not s.tasks:
        return ScenarioStats(0, classes, 0.0, 0.0, 0)
    durations = np.array([t.duration for t in s.tasks], dtype=float)
    flexibilities = np.array([t.flexibility for t in s.tasks], dtype=float)
    return ScenarioStats(
        task_count=len(s.tasks),
        counts_by_class=classes,
        mean_duration=float(durations.mean()),
        mean_flexibility=float(flexibilities.mean()),
        max_duration=int(durations.max()),
    )
