# hydrator.py
import json
from dataclasses import asdict, fields, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar, get_args, get_origin, get_type_hints

from experiments.plan import ExperimentPlan
from MFMP.errors import InvalidArgumentError
from MFMP.fleet import (
    CatalogCosts,
    FleetCatalog,
    FleetMix,
    FleetMode,
    ModuleType,
    VehicleKind,
    VehicleType,
    catalog_for,
    check_cost_parity,
)
from MFMP.network import Graph
from MFMP.task import Scenario, ScenarioConfig, Task, TaskSize, TaskType
from runtime.solver import Individual, Objectives, ParetoArchive

T = TypeVar("T")


def read_json(path: Path) -> Any:
    try:
        with Path(path).open() as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"{path} is not valid JSON: {e}") from None


def write_json(path: Path, document: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n")
    return path


def to_document(obj: Any) -> Any:
    """Plain JSON form of a config dataclass: enums by value, tuples as lists."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_document(asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: to_document(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_document(v) for v in obj]
    return obj


class Hydrator:
    """
    Turns JSON documents into domain objects. Config documents are checked key
    by key against their dataclass: unknown keys are rejected and every value is
    converted to the declared field type.
    """

    def __init__(self):
        self.warnings: List[str] = []

    def _expect(self, document: Any, kind: type, where: str) -> None:
        if not isinstance(document, kind):
            raise InvalidArgumentError(
                f"{where}: expected a JSON {kind.__name__}, got {type(document).__name__}"
            )

    def _convert(self, hint: Any, value: Any, where: str) -> Any:
        if isinstance(hint, type) and issubclass(hint, Enum):
            try:
                return hint(value)
            except ValueError:
                choices = ", ".join(str(m.value) for m in hint)
                raise InvalidArgumentError(f"{where}: {value!r} is not one of {choices}") from None
        if isinstance(hint, type) and is_dataclass(hint):
            return self.config(hint, value, where)
        if get_origin(hint) is tuple:
            self._expect(value, list, where)
            element = get_args(hint)[0]
            return tuple(self._convert(element, v, f"{where}[{i}]") for i, v in enumerate(value))
        if hint is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidArgumentError(f"{where}: expected a number, got {value!r}")
            return float(value)
        if hint is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidArgumentError(f"{where}: expected an integer, got {value!r}")
            return value
        if hint is bool:
            if not isinstance(value, bool):
                raise InvalidArgumentError(f"{where}: expected true or false, got {value!r}")
            return value
        if hint is str:
            if not isinstance(value, str):
                raise InvalidArgumentError(f"{where}: expected a string, got {value!r}")
            return value
        return value

    def config(self, cls: Type[T], document: Any, where: Optional[str] = None) -> T:
        """Hydrates any config dataclass; missing keys keep their defaults."""
        where = where or cls.__name__
        self._expect(document, dict, where)
        hints = get_type_hints(cls)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(document) - known)
        if unknown:
            raise InvalidArgumentError(f"{where}: unknown keys {', '.join(unknown)}")
        values = {
            name: self._convert(hints[name], value, f"{where}.{name}")
            for name, value in document.items()
        }
        return cls(**values)

    def graph(self, document: Any) -> Graph:
        self._expect(document, dict, "graph")
        try:
            pairs = [(int(u), int(v)) for u, v in document["edges"]]
            graph = Graph.from_edges(int(document["nodes"]), pairs)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgumentError(f"graph: malformed document ({e})") from None
        if graph.edge_count != len(pairs):
            self.warnings.append(
                f"graph: dropped {len(pairs) - graph.edge_count} self-loop or duplicate edge(s)"
            )
        return graph

    def task(self, document: Any, where: str) -> Task:
        self._expect(document, dict, where)
        try:
            return Task(
                id=int(document["id"]),
                task_type=self._convert(TaskType, document["task_type"], f"{where}.task_type"),
                size=self._convert(TaskSize, document["size"], f"{where}.size"),
                origin=int(document["origin"]),
                destination=int(document["destination"]),
                earliest_start=int(document["earliest_start"]),
                duration=int(document["duration"]),
                flexibility=int(document.get("flexibility", 0)),
            )
        except KeyError as e:
            raise InvalidArgumentError(f"{where}: missing key {e}") from None

    def scenario(self, document: Any) -> Scenario:
        self._expect(document, dict, "scenario")
        graph = self.graph(document.get("graph"))
        cfg = self.config(ScenarioConfig, document.get("config", {}), "scenario.config")
        tasks = [self.task(t, f"scenario.tasks[{i}]") for i, t in enumerate(document.get("tasks", []))]
        tasks.sort(key=lambda t: (t.earliest_start, t.id))
        return Scenario(graph=graph, tasks=tuple(tasks), config=cfg)

    def catalog(self, document: Any) -> FleetCatalog:
        """
        Either a full catalog (mode, vehicle_types, module_types, and for a
        modular one optionally fixed_costs) or the short form
        {"mode": ..., "costs": {...}} naming a default catalog.
        """
        self._expect(document, dict, "catalog")
        mode = self._convert(FleetMode, document.get("mode"), "catalog.mode")
        if "vehicle_types" not in document:
            unknown = sorted(set(document) - {"mode", "costs"})
            if unknown:
                raise InvalidArgumentError(f"catalog: unknown keys {', '.join(unknown)}")
            return catalog_for(mode, self.config(CatalogCosts, document.get("costs", {}), "catalog.costs"))

        vehicle_types = []
        for i, v in enumerate(document["vehicle_types"]):
            where = f"catalog.vehicle_types[{i}]"
            self._expect(v, dict, where)
            vehicle_types.append(
                VehicleType(
                    id=v["id"],
                    size=self._convert(TaskSize, v["size"], f"{where}.size"),
                    kind=self._convert(VehicleKind, v["kind"], f"{where}.kind"),
                    purchase_cost=float(v["purchase_cost"]),
                    lane_length=float(v["lane_length"]),
                    task_type=(
                        self._convert(TaskType, v["task_type"], f"{where}.task_type")
                        if v.get("task_type") is not None
                        else None
                    ),
                )
            )
        module_types = [
            ModuleType(
                id=m["id"],
                task_type=self._convert(TaskType, m["task_type"], f"catalog.module_types[{i}].task_type"),
                cost=float(m.get("cost", 0.0)),
            )
            for i, m in enumerate(document.get("module_types", []))
        ]
        cat = FleetCatalog(mode=mode, vehicle_types=tuple(vehicle_types), module_types=tuple(module_types))
        if "fixed_costs" in document:
            self._check_fixed_costs(cat, document["fixed_costs"])
        return cat

    def _check_fixed_costs(self, cat: FleetCatalog, document: Any) -> None:
        """``fixed_costs`` maps a size to the fixed vehicle price a configured motive unit must match."""
        self._expect(document, dict, "catalog.fixed_costs")
        if not cat.is_modular:
            raise InvalidArgumentError("catalog.fixed_costs only applies to a modular catalog")
        try:
            twins = tuple(
                VehicleType(
                    id=f"{motive.size.value}_{task_type.value}",
                    size=motive.size,
                    kind=VehicleKind.FIXED,
                    task_type=task_type,
                    purchase_cost=float(document[motive.size.value]),
                    lane_length=motive.lane_length,
                )
                for motive in cat.vehicle_types
                for task_type in TaskType
            )
        except KeyError as e:
            raise InvalidArgumentError(f"catalog.fixed_costs: missing size {e}") from None
        check_cost_parity(FleetCatalog(mode=FleetMode.FIXED, vehicle_types=twins), cat)

    def mix(self, document: Any, cat: FleetCatalog) -> FleetMix:
        self._expect(document, dict, "mix")
        unknown = sorted(set(document) - {"vehicles", "modules"})
        if unknown:
            raise InvalidArgumentError(f"mix: unknown keys {', '.join(unknown)}")
        counts = {**document.get("vehicles", {}), **document.get("modules", {})}
        for type_id, count in counts.items():
            self._convert(int, count, f"mix.{type_id}")
        mix = FleetMix.of(cat, **counts)
        mix.check_against(cat)
        return mix

    def archive(self, document: Any, cat: FleetCatalog) -> ParetoArchive:
        self._expect(document, dict, "archive")
        archive = ParetoArchive(tuple(document.get("epsilon", (0.0, 0.0, 0.0))))
        for member in document.get("members", []):
            archive.insert(
                Individual(
                    mix=self.mix(member["mix"], cat),
                    objectives=Objectives(**member["objectives"]),
                    feasible=bool(member.get("feasible", True)),
                )
            )
        return archive


# --- dumping -----------------------------------------------------------------


def graph_document(g: Graph) -> Dict[str, Any]:
    return {"nodes": g.node_count, "edges": [list(e) for e in g.sorted_edges()]}


def task_document(t: Task) -> Dict[str, Any]:
    return {
        "id": t.id,
        "task_type": t.task_type.value,
        "size": t.size.value,
        "origin": t.origin,
        "destination": t.destination,
        "earliest_start": t.earliest_start,
        "duration": t.duration,
        "flexibility": t.flexibility,
    }


def scenario_document(s: Scenario) -> Dict[str, Any]:
    return {
        "graph": graph_document(s.graph),
        "config": to_document(s.config),
        "tasks": [task_document(t) for t in s.tasks],
    }


def catalog_document(cat: FleetCatalog) -> Dict[str, Any]:
    return {
        "mode": cat.mode.value,
        "vehicle_types": [to_document(v) for v in cat.vehicle_types],
        "module_types": [to_document(m) for m in cat.module_types],
    }


def mix_document(mix: FleetMix) -> Dict[str, Any]:
    return {
        "vehicles": dict(sorted(mix.vehicle_counts.items())),
        "modules": dict(sorted(mix.module_counts.items())),
    }


def individual_document(ind: Individual) -> Dict[str, Any]:
    return {
        "mix": mix_document(ind.mix),
        "objectives": {
            "F": ind.objectives.F,
            "diversity": ind.objectives.diversity,
            "lane": ind.objectives.lane,
        },
        "feasible": ind.feasible,
    }


def archive_document(archive: ParetoArchive) -> Dict[str, Any]:
    members = sorted(archive.members, key=lambda m: (m.objectives.F, m.mix.key()))
    return {"epsilon": list(archive.epsilon), "members": [individual_document(m) for m in members]}


def plan_document(plan: ExperimentPlan) -> Dict[str, Any]:
    return to_document(plan)


def hydrate_plan(document: Any) -> ExperimentPlan:
    return Hydrator().config(ExperimentPlan, document, "plan")
