# fleet.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgumentError
from .task import Task, TaskSize, TaskType


class FleetMode(Enum):
    FIXED = "fixed"
    MODULAR = "modular"

    @staticmethod
    def from_text(text: str) -> FleetMode:
        txt = text.lower()
        for member in FleetMode:
            if member.value == txt:
                return member
        raise InvalidArgumentError(
            f"Unknown fleet mode: {text}, must be one of {', '.join(m.value for m in FleetMode)}"
        )


class VehicleKind(Enum):
    FIXED = "fixed"
    MOTIVE = "motive"


@dataclass(frozen=True)
class VehicleType:
    """
    A vehicle type: either a fixed vehicle with a built-in task type or a
    motive unit that needs a module. ``purchase_cost`` is the expected
    lifetime cost; ``lane_length`` is its sealift footprint in meters.
    """

    id: str
    size: TaskSize
    kind: VehicleKind
    purchase_cost: float
    lane_length: float
    task_type: Optional[TaskType] = None

    def __post_init__(self) -> None:
        if self.purchase_cost <= 0:
            raise InvalidArgumentError(
                f"VehicleType {self.id!r}: purchase_cost must be > 0, got {self.purchase_cost}"
            )
        if self.lane_length <= 0:
            raise InvalidArgumentError(
                f"VehicleType {self.id!r}: lane_length must be > 0, got {self.lane_length}"
            )
        if self.kind is VehicleKind.FIXED and self.task_type is None:
            raise InvalidArgumentError(f"Fixed VehicleType {self.id!r} needs a task_type")
        if self.kind is VehicleKind.MOTIVE and self.task_type is not None:
            raise InvalidArgumentError(f"Motive VehicleType {self.id!r} cannot carry a task_type")

    @property
    def is_motive(self) -> bool:
        return self.kind is VehicleKind.MOTIVE

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class ModuleType:
    id: str
    task_type: TaskType
    cost: float = 0.0

    def __post_init__(self) -> None:
        if self.cost < 0:
            raise InvalidArgumentError(f"ModuleType {self.id!r}: cost must be >= 0, got {self.cost}")

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class FleetCatalog:
    """
    The vehicle and module types available to one fleet mode.
    """

    mode: FleetMode
    vehicle_types: Tuple[VehicleType, ...]
    module_types: Tuple[ModuleType, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        ids = [v.id for v in self.vehicle_types] + [m.id for m in self.module_types]
        if len(ids) != len(set(ids)):
            raise InvalidArgumentError(f"Duplicate type ids in catalog: {ids}")
        if not self.vehicle_types:
            raise InvalidArgumentError("A catalog needs at least one vehicle type")

        if self.mode is FleetMode.FIXED:
            if self.module_types:
                raise InvalidArgumentError("A fixed catalog cannot hold module types")
            if any(v.is_motive for v in self.vehicle_types):
                raise InvalidArgumentError("A fixed catalog cannot hold motive units")
            _require_one_each(
                "fixed vehicle type",
                [(v.size, v.task_type) for v in self.vehicle_types],
                [(s, t) for s in TaskSize for t in TaskType],
            )
        else:
            if not all(v.is_motive for v in self.vehicle_types):
                raise InvalidArgumentError("A modular catalog holds motive units only")
            _require_one_each("motive unit", [v.size for v in self.vehicle_types], list(TaskSize))
            _require_one_each("module type", [m.task_type for m in self.module_types], list(TaskType))
            costs = {m.cost for m in self.module_types}
            if len(costs) != 1:
                raise InvalidArgumentError(f"All module types must cost the same, got {sorted(costs)}")

    def vehicle_type(self, type_id: str) -> VehicleType:
        for v in self.vehicle_types:
            if v.id == type_id:
                return v
        raise InvalidArgumentError(f"Unknown vehicle type {type_id!r} in {self.mode.value} catalog")

    def module_type(self, type_id: str) -> ModuleType:
        for m in self.module_types:
            if m.id == type_id:
                return m
        raise InvalidArgumentError(f"Unknown module type {type_id!r} in {self.mode.value} catalog")

    @property
    def is_modular(self) -> bool:
        return self.mode is FleetMode.MODULAR

    def __str__(self) -> str:
        return f"{self.mode.value} catalog ({', '.join(map(str, self.vehicle_types + self.module_types))})"


def _require_one_each(what: str, found: Sequence, expected: Sequence) -> None:
    def label(item) -> str:
        return "/".join(e.value for e in item) if isinstance(item, tuple) else item.value

    if sorted(map(label, found)) != sorted(map(label, expected)):
        raise InvalidArgumentError(
            f"Expected exactly one {what} for each of {', '.join(map(label, expected))}, "
            f"got {', '.join(map(label, found)) or 'none'}"
        )


def check_cost_parity(fixed: FleetCatalog, modular: FleetCatalog) -> None:
    """A motive unit with its module must cost what the fixed vehicle of its size costs."""
    if fixed.mode is not FleetMode.FIXED or not modular.is_modular:
        raise InvalidArgumentError("Cost parity compares a fixed catalog with a modular one")
    for motive in modular.vehicle_types:
        for module in modular.module_types:
            twin = next(
                v for v in fixed.vehicle_types if v.size is motive.size and v.task_type is module.task_type
            )
            if not math.isclose(configured_cost(motive, module), twin.purchase_cost, rel_tol=1e-12):
                raise InvalidArgumentError(
                    f"{motive.id} + {module.id} costs {configured_cost(motive, module)}, "
                    f"but {twin.id} costs {twin.purchase_cost}"
                )


@dataclass
class CatalogCosts:
    """
    Cost and lane-length constants for the default catalogs. No published
    values exist, so every figure is overridable; a configured motive unit
    must cost the same as the fixed vehicle of its size.
    """

    medium_fixed: float = 1.0
    heavy_fixed: float = 1.6
    medium_motive: float = 0.95
    heavy_motive: float = 1.55
    module: float = 0.05
    medium_lane: float = 9.0
    heavy_lane: float = 12.0

    def __post_init__(self) -> None:
        for pair in (("medium_motive", "medium_fixed"), ("heavy_motive", "heavy_fixed")):
            motive, fixed = (getattr(self, name) for name in pair)
            if not math.isclose(motive + self.module, fixed, rel_tol=1e-12):
                raise InvalidArgumentError(
                    f"CatalogCosts: {pair[0]} + module ({motive} + {self.module}) "
                    f"must equal {pair[1]} ({fixed})"
                )


def fixed_catalog(costs: Optional[CatalogCosts] = None) -> FleetCatalog:
    costs = costs or CatalogCosts()
    vehicle_types = tuple(
        VehicleType(
            id=f"{size.value}_{task_type.value}",
            size=size,
            kind=VehicleKind.FIXED,
            task_type=task_type,
            purchase_cost=costs.medium_fixed if size is TaskSize.MEDIUM else costs.heavy_fixed,
            lane_length=costs.medium_lane if size is TaskSize.MEDIUM else costs.heavy_lane,
        )
        for size in TaskSize
        for task_type in TaskType
    )
    return FleetCatalog(mode=FleetMode.FIXED, vehicle_types=vehicle_types)


def modular_catalog(costs: Optional[CatalogCosts] = None) -> FleetCatalog:
    costs = costs or CatalogCosts()
    vehicle_types = tuple(
        VehicleType(
            id=f"{size.value}_motive",
            size=size,
            kind=VehicleKind.MOTIVE,
            purchase_cost=costs.medium_motive if size is TaskSize.MEDIUM else costs.heavy_motive,
            lane_length=costs.medium_lane if size is TaskSize.MEDIUM else costs.heavy_lane,
        )
        for size in TaskSize
    )
    module_types = tuple(
        ModuleType(id=f"module_{task_type.value}", task_type=task_type, cost=costs.module)
        for task_type in TaskType
    )
    return FleetCatalog(mode=FleetMode.MODULAR, vehicle_types=vehicle_types, module_types=module_types)


def catalog_for(mode: FleetMode, costs: Optional[CatalogCosts] = None) -> FleetCatalog:
    return modular_catalog(costs) if mode is FleetMode.MODULAR else fixed_catalog(costs)


@dataclass(frozen=True)
class FleetMix:
    """
    The decision vector: vehicle counts per vehicle type and module counts per
    module type. Every catalog type is present, zeros included.
    """

    vehicle_counts: Dict[str, int]
    module_counts: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for type_id, count in {**self.vehicle_counts, **self.module_counts}.items():
            if count < 0:
                raise InvalidArgumentError(f"FleetMix: count for {type_id!r} must be >= 0, got {count}")

    @staticmethod
    def empty(cat: FleetCatalog) -> FleetMix:
        return FleetMix(
            vehicle_counts={v.id: 0 for v in cat.vehicle_types},
            module_counts={m.id: 0 for m in cat.module_types},
        )

    @staticmethod
    def of(cat: FleetCatalog, **counts: int) -> FleetMix:
        """Builds a mix from keyword counts; types not named are zero."""
        mix = FleetMix.empty(cat)
        vehicles, modules = dict(mix.vehicle_counts), dict(mix.module_counts)
        for type_id, count in counts.items():
            if type_id in vehicles:
                vehicles[type_id] = count
            elif type_id in modules:
                modules[type_id] = count
            else:
                raise InvalidArgumentError(f"Unknown type {type_id!r} in {cat}")
        return FleetMix(vehicle_counts=vehicles, module_counts=modules)

    def with_added(
        self, vehicle_id: Optional[str] = None, module_id: Optional[str] = None, count: int = 1
    ) -> FleetMix:
        vehicles, modules = dict(self.vehicle_counts), dict(self.module_counts)
        if vehicle_id is not None:
            vehicles[vehicle_id] = vehicles.get(vehicle_id, 0) + count
        if module_id is not None:
            modules[module_id] = modules.get(module_id, 0) + count
        return FleetMix(vehicle_counts=vehicles, module_counts=modules)

    def merged(self, other: FleetMix) -> FleetMix:
        vehicles, modules = dict(self.vehicle_counts), dict(self.module_counts)
        for type_id, count in other.vehicle_counts.items():
            vehicles[type_id] = vehicles.get(type_id, 0) + count
        for type_id, count in other.module_counts.items():
            modules[type_id] = modules.get(type_id, 0) + count
        return FleetMix(vehicle_counts=vehicles, module_counts=modules)

    def key(self) -> Tuple[Tuple[str, int], ...]:
        return tuple(sorted(self.vehicle_counts.items())) + tuple(sorted(self.module_counts.items()))

    @property
    def total_vehicles(self) -> int:
        return sum(self.vehicle_counts.values())

    @property
    def total_modules(self) -> int:
        return sum(self.module_counts.values())

    def check_against(self, cat: FleetCatalog) -> None:
        for type_id in self.vehicle_counts:
            cat.vehicle_type(type_id)
        for type_id, count in self.module_counts.items():
            if cat.mode is FleetMode.FIXED and count:
                raise InvalidArgumentError(f"A fixed-mode mix cannot hold modules ({type_id!r}={count})")
            if cat.is_modular:
                cat.module_type(type_id)

    def __str__(self) -> str:
        parts = [f"{k}={v}" for k, v in self.key() if v]
        return f"FleetMix({', '.join(parts) or 'empty'})"


def acquisition_cost(mix: FleetMix, cat: FleetCatalog) -> float:
    """Sum of purchase costs of all vehicles and modules in the mix."""
    mix.check_against(cat)
    items = [cat.vehicle_type(k).purchase_cost for k, n in mix.vehicle_counts.items() for _ in range(n)]
    if cat.is_modular:
        items += [cat.module_type(k).cost for k, n in mix.module_counts.items() for _ in range(n)]
    return math.fsum(items)


def diversity(mix: FleetMix) -> float:
    """Population variance of the vehicle counts over vehicle types (modules excluded)."""
    if not mix.vehicle_counts:
        raise InvalidArgumentError("Diversity needs at least one vehicle type")
    return float(np.var(np.array(list(mix.vehicle_counts.values()), dtype=float)))


def lane_meters(mix: FleetMix, cat: FleetCatalog) -> float:
    """Sealift length of the vehicles; modules ride on motive units and add nothing."""
    mix.check_against(cat)
    return math.fsum(
        cat.vehicle_type(k).lane_length for k, n in mix.vehicle_counts.items() for _ in range(n)
    )


def can_serve(v: VehicleType, m: Optional[ModuleType], t: Task) -> bool:
    if v.is_motive:
        if m is None:
            raise InvalidArgumentError(f"Motive unit {v.id!r} needs a module to serve {t}")
        type_ok = m.task_type is t.task_type
    else:
        if m is not None:
            raise InvalidArgumentError(f"Fixed vehicle {v.id!r} cannot take module {m.id!r}")
        type_ok = v.task_type is t.task_type
    size_ok = v.size is TaskSize.HEAVY or t.size is TaskSize.MEDIUM
    return type_ok and size_ok


def bundle_capacity(v: VehicleType) -> int:
    """Medium-equivalent load slots of a vehicle."""
    return 2 if v.size is TaskSize.HEAVY else 1


def load_slots(t: Task) -> int:
    return 2 if t.size is TaskSize.HEAVY else 1


def fits(v: VehicleType, tasks: Iterable[Task]) -> bool:
    return sum(load_slots(t) for t in tasks) <= bundle_capacity(v)


def configured_cost(v: VehicleType, m: Optional[ModuleType]) -> float:
    """Purchase cost of a ready-to-drive vehicle: the motive unit plus its module."""
    return v.purchase_cost + (m.cost if m is not None else 0.0)
