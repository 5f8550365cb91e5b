# conftest.py
from typing import Iterable, Optional, Tuple

import pytest

from MFMP.fleet import FleetMode, catalog_for
from MFMP.network import Graph, ring
from MFMP.task import Scenario, ScenarioConfig, Task, TaskSize, TaskType


def make_task(
    task_id: int,
    origin: int,
    destination: int,
    earliest_start: int = 0,
    task_type: TaskType = TaskType.TYPE1,
    size: TaskSize = TaskSize.MEDIUM,
    duration: int = 270,
    flexibility: int = 0,
) -> Task:
    return Task(
        id=task_id,
        task_type=task_type,
        size=size,
        origin=origin,
        destination=destination,
        earliest_start=earliest_start,
        duration=duration,
        flexibility=flexibility,
    )


def make_scenario(
    tasks: Iterable[Task], graph: Optional[Graph] = None, config: Optional[ScenarioConfig] = None
) -> Scenario:
    ordered: Tuple[Task, ...] = tuple(sorted(tasks, key=lambda t: (t.earliest_start, t.id)))
    return Scenario(graph=graph or ring(10), tasks=ordered, config=config or ScenarioConfig())


@pytest.fixture
def ring10() -> Graph:
    return ring(10)


@pytest.fixture
def fixed_cat():
    return catalog_for(FleetMode.FIXED)


@pytest.fixture
def modular_cat():
    return catalog_for(FleetMode.MODULAR)
