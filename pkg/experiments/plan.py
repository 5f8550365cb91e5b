# plan.py
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Optional, Tuple

import numpy as np

from MFMP.errors import InvalidArgumentError
from MFMP.fleet import CatalogCosts, FleetMode
from MFMP.network import NetworkKind
from MFMP.task import FlexibilityMode, ScenarioConfig
from runtime.policy import DispatchConfig
from runtime.solver import SolverConfig

# Fixed orders used by seed splitting and by row sorting.
TOPOLOGY_ORDER: Tuple[NetworkKind, ...] = (NetworkKind.RING, NetworkKind.SW1, NetworkKind.SW2)
MODE_ORDER: Tuple[FleetMode, ...] = (FleetMode.FIXED, FleetMode.MODULAR)

EXP1_Y_VALUES: Tuple[float, ...] = (0, 15, 30, 60, 120, 240)
EXP2_ALPHA_VALUES: Tuple[float, ...] = (0, 0.25, 0.5, 1, 2, 4, 100)


class SweepVariable(Enum):
    PENALTY_WINDOW_Y = "penalty_window_y"
    FLEXIBILITY_ALPHA = "flexibility_alpha"

    @staticmethod
    def from_text(text: str) -> SweepVariable:
        txt = text.lower()
        for member in SweepVariable:
            if member.value == txt:
                return member
        raise InvalidArgumentError(
            f"Unknown sweep variable: {text}, must be one of {', '.join(m.value for m in SweepVariable)}"
        )


def format_value(value: float) -> str:
    """Canonical text of a sweep value, used in CSV keys."""
    return f"{float(value):g}"


@dataclass(frozen=True)
class CellSpec:
    """One (topology, fleet mode, sweep value, replicate) run of a plan."""

    topology: NetworkKind
    mode: FleetMode
    value_index: int
    sweep_value: float
    replicate: int
    replicate_seed: int

    def key(self) -> Tuple[str, str, str, str]:
        return (self.topology.value, self.mode.value, format_value(self.sweep_value), str(self.replicate_seed))


def replicate_seed(master_seed: int, topology: NetworkKind, replicate: int) -> int:
    """Network and scenario seed of a replicate; shared by both modes and every sweep value."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(TOPOLOGY_ORDER.index(topology), replicate))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def solver_seed(rep_seed: int, mode: FleetMode, value_index: int) -> int:
    ss = np.random.SeedSequence(rep_seed, spawn_key=(MODE_ORDER.index(mode), value_index))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass
class ExperimentPlan:
    """
    A full factorial sweep. Experiment 1 sweeps the penalty window y over
    route-relative scenarios; Experiment 2 sweeps proportional flexibility with
    the penalty switched off.
    """

    name: str = "exp1"
    sweep: SweepVariable = SweepVariable.PENALTY_WINDOW_Y
    sweep_values: Tuple[float, ...] = EXP1_Y_VALUES
    topologies: Tuple[NetworkKind, ...] = TOPOLOGY_ORDER
    modes: Tuple[FleetMode, ...] = MODE_ORDER
    replicates: int = 20
    node_count: int = 10
    sw2_bias: float = 0.5
    master_seed: int = 0
    workers: int = 1
    record_runtime: bool = True
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    dispatch: DispatchConfig = field(default_factory=DispatchConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    costs: CatalogCosts = field(default_factory=CatalogCosts)

    def __post_init__(self) -> None:
        self.sweep_values = tuple(float(v) for v in self.sweep_values)
        self.topologies = tuple(self.topologies)
        self.modes = tuple(self.modes)
        if self.replicates < 1:
            raise InvalidArgumentError(f"ExperimentPlan.replicates must be >= 1, got {self.replicates}")
        if not self.sweep_values:
            raise InvalidArgumentError("ExperimentPlan.sweep_values must not be empty")
        if any(b <= a for a, b in zip(self.sweep_values, self.sweep_values[1:])):
            raise InvalidArgumentError(
                f"ExperimentPlan.sweep_values must be strictly increasing, got {self.sweep_values}"
            )
        if any(v < 0 for v in self.sweep_values):
            raise InvalidArgumentError(f"ExperimentPlan.sweep_values must be >= 0, got {self.sweep_values}")
        if self.sweep is SweepVariable.PENALTY_WINDOW_Y and any(
            not v.is_integer() for v in self.sweep_values
        ):
            raise InvalidArgumentError(
                f"Penalty windows are whole minutes, got {self.sweep_values}"
            )
        if not self.topologies or len(set(self.topologies)) != len(self.topologies):
            raise InvalidArgumentError("ExperimentPlan.topologies must be distinct and non-empty")
        if not self.modes or len(set(self.modes)) != len(self.modes):
            raise InvalidArgumentError("ExperimentPlan.modes must be distinct and non-empty")
        if self.workers < 1:
            raise InvalidArgumentError(f"ExperimentPlan.workers must be >= 1, got {self.workers}")

    def scenario_config_for(self, value: float, seed: int) -> ScenarioConfig:
        if self.sweep is SweepVariable.FLEXIBILITY_ALPHA:
            return replace(
                self.scenario,
                flexibility_mode=FlexibilityMode.PROPORTIONAL,
                flexibility_alpha=value,
                seed=seed,
            )
        return replace(self.scenario, flexibility_mode=FlexibilityMode.ROUTE_RELATIVE, seed=seed)

    def dispatch_config_for(self, value: float) -> DispatchConfig:
        if self.sweep is SweepVariable.FLEXIBILITY_ALPHA:
            return replace(self.dispatch, penalty_window_y_min=0)
        return replace(self.dispatch, penalty_window_y_min=int(value))

    def cells(self) -> Iterator[CellSpec]:
        for topology in self.topologies:
            for replicate in range(self.replicates):
                seed = replicate_seed(self.master_seed, topology, replicate)
                for mode in self.modes:
                    for value_index, value in enumerate(self.sweep_values):
                        yield CellSpec(topology, mode, value_index, value, replicate, seed)

    @property
    def cell_count(self) -> int:
        return len(self.topologies) * len(self.modes) * len(self.sweep_values) * self.replicates


PRESETS = {
    "desk": dict(horizon_min=240, replicates=5, population_size=10, generations=30),
    "full": dict(horizon_min=720, replicates=20, population_size=20, generations=100),
}


def _preset_plan(name: str, preset: str, sweep: SweepVariable, values: Tuple[float, ...], master_seed: int) -> ExperimentPlan:
    if preset not in PRESETS:
        raise InvalidArgumentError(f"Unknown preset {preset!r}, must be one of {', '.join(PRESETS)}")
    p = PRESETS[preset]
    return ExperimentPlan(
        name=name,
        sweep=sweep,
        sweep_values=values,
        replicates=p["replicates"],
        master_seed=master_seed,
        scenario=ScenarioConfig(horizon_min=p["horizon_min"]),
        solver=SolverConfig(population_size=p["population_size"], generations=p["generations"]),
    )


def experiment1_plan(preset: str = "desk", master_seed: int = 0, values: Optional[Tuple[float, ...]] = None) -> ExperimentPlan:
    return _preset_plan("exp1", preset, SweepVariable.PENALTY_WINDOW_Y, values or EXP1_Y_VALUES, master_seed)


def experiment2_plan(preset: str = "desk", master_seed: int = 0, values: Optional[Tuple[float, ...]] = None) -> ExperimentPlan:
    return _preset_plan("exp2", preset, SweepVariable.FLEXIBILITY_ALPHA, values or EXP2_ALPHA_VALUES, master_seed)
