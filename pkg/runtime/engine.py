# engine.py
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from heapq import heapify, heappop
from typing import Deque, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from MFMP.errors import InvalidArgumentError, RepairFailureError
from MFMP.fleet import (
    FleetCatalog,
    FleetMix,
    ModuleType,
    VehicleType,
    acquisition_cost,
    can_serve,
    configured_cost,
    fits,
)
from MFMP.network import Route, distance_matrix, route_candidates, shortest_route
from MFMP.task import Scenario, Task, TaskSize, TaskType

from .instances import (
    AssignmentOption,
    ModuleInstance,
    TaskRecord,
    TrafficLog,
    Trip,
    VehicleInstance,
)
from .policy import DispatchConfig, policies_for
from .tracer import LogColors, MermaidGanttGenerator, SimulationTracer


def route_penalty(
    route: Sequence[int],
    log: TrafficLog,
    now: int,
    y: int,
    purchase_cost: float,
    rate: float = 0.001,
) -> float:
    """
    Traffic penalty of a route: the busiest node's crossings in (now - y, now]
    times ``rate`` times the purchase cost. Route endpoints count.
    """
    if y < 0:
        raise InvalidArgumentError(f"Penalty window must be >= 0, got y={y}")
    if y == 0 or not route:
        return 0.0
    peak = max(log.count(v, now, y) for v in route)
    return peak * rate * purchase_cost


def select_route(
    candidates: Sequence[Route],
    task: Task,
    clock: int,
    log: TrafficLog,
    purchase_cost: float,
    cfg: DispatchConfig,
    *,
    start: int,
    edge_minutes: int,
    latest_completion: Optional[int] = None,
) -> Optional[Tuple[Route, float]]:
    """
    Picks the window-feasible candidate with the lowest
    ``time_weight * minutes + penalty``; the earlier candidate wins ties.
    Returns None when no candidate reaches the destination in time.
    """
    deadline = task.latest_completion if latest_completion is None else latest_completion
    y = cfg.penalty_window_y_min
    counts: Dict[int, int] = {}

    best = None
    for route in candidates:
        minutes = (len(route) - 1) * edge_minutes
        if start + minutes > deadline:
            continue
        if y == 0:
            # Candidates are sorted shortest first, so the first feasible one wins.
            return route, 0.0
        for v in route:
            if v not in counts:
                counts[v] = log.count(v, clock, y)
        penalty = max(counts[v] for v in route) * cfg.penalty_rate * purchase_cost
        score = cfg.time_weight * minutes + penalty
        if best is None or score < best[0]:
            best = (score, route, penalty)

    if best is None:
        return None
    return best[1], best[2]


@dataclass
class ScheduleResult:
    feasible: bool
    unserved_tasks: Tuple[int, ...]
    per_task: Tuple[TaskRecord, ...]
    traffic_penalty_total: float
    acquisition_cost: float
    objective_F: float
    crossings: int
    mix: FleetMix
    commissioned: FleetMix
    trips: Tuple[Trip, ...] = field(default_factory=tuple)

    def record(self, task_id: int) -> TaskRecord:
        for r in self.per_task:
            if r.task_id == task_id:
                return r
        raise InvalidArgumentError(f"Task {task_id} has no record in this schedule")

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "unserved_tasks": list(self.unserved_tasks),
            "objective_F": self.objective_F,
            "acquisition_cost": self.acquisition_cost,
            "traffic_penalty_total": self.traffic_penalty_total,
            "crossings": self.crossings,
            "mix": {
                "vehicles": dict(sorted(self.mix.vehicle_counts.items())),
                "modules": dict(sorted(self.mix.module_counts.items())),
            },
            "per_task": [r.to_dict() for r in self.per_task],
        }

    def __str__(self) -> str:
        status = "feasible" if self.feasible else f"infeasible ({len(self.unserved_tasks)} unserved)"
        return (
            f"ScheduleResult({status}, F={self.objective_F:.4f}, "
            f"penalty={self.traffic_penalty_total:.4f}, trips={len(self.trips)})"
        )


class Engine:
    """
    Event-driven dispatcher for one scenario and one fleet mix.

    Modular units are matched in two tiers. First a motive unit still holding
    the module it last carried, or a fresh motive unit with a fresh module,
    exactly as a fixed fleet would be matched. Only if neither can meet the
    window does a unit pick up a parked module or fit a fresh one.

    In commission mode a task that no unit can serve triggers the purchase of
    the cheapest addition that can, and the run carries on. A ``paired``
    commission run never picks up modules and buys motive units only together
    with a module, so a modular fleet follows the fixed fleet's purchases.
    """

    def __init__(
        self,
        scenario: Scenario,
        mix: FleetMix,
        catalog: FleetCatalog,
        config: Optional[DispatchConfig] = None,
        commission: bool = False,
        paired: bool = False,
        verbose: bool = False,
    ):
        mix.check_against(catalog)
        self.scenario = scenario
        self.graph = scenario.graph
        self.mix = mix
        self.catalog = catalog
        self.config = config or DispatchConfig()
        self.commission = commission
        self.pickups = catalog.is_modular and not (commission and paired)
        self.verbose = verbose

        self.task_order, self.fleet_policy, self.bundling = policies_for(self.config)
        self.edge = scenario.config.edge_travel_min
        self.waiting = (
            self.config.waiting_modular_min if catalog.is_modular else self.config.waiting_fixed_min
        )
        distances = distance_matrix(self.graph) if scenario.tasks else ()
        self._minutes = tuple(tuple(d * self.edge for d in row) for row in distances)

        self.vehicles: List[VehicleInstance] = []
        self.modules: List[ModuleInstance] = []
        self._fresh_vehicles: Dict[str, Deque[VehicleInstance]] = {
            vt.id: deque() for vt in catalog.vehicle_types
        }
        self._in_service: Dict[str, List[VehicleInstance]] = {vt.id: [] for vt in catalog.vehicle_types}
        self._fresh_modules: Dict[TaskType, Deque[ModuleInstance]] = defaultdict(deque)
        self._parked: Dict[TaskType, Dict[int, List[ModuleInstance]]] = defaultdict(
            lambda: defaultdict(list)
        )
        self._module_type: Dict[TaskType, ModuleType] = {mt.task_type: mt for mt in catalog.module_types}
        self._compatible_cache: Dict[Tuple, Tuple[VehicleType, ...]] = {}

        for vt in catalog.vehicle_types:
            for _ in range(mix.vehicle_counts.get(vt.id, 0)):
                self._add_vehicle(vt)
        for mt in catalog.module_types:
            for _ in range(mix.module_counts.get(mt.id, 0)):
                self._add_module(mt)

        self.traffic = TrafficLog(self.graph.node_count)
        self.tracer = SimulationTracer()
        self.trips: List[Trip] = []
        self.records: Dict[int, TaskRecord] = {}
        self.unserved: List[int] = []
        self.penalties: List[float] = []
        self.commissioned = FleetMix.empty(catalog)
        self._deployed = 0

        self._lanes: Dict[Tuple, List[Task]] = defaultdict(list)
        for t in scenario.tasks:
            self._lanes[(t.origin, t.destination, t.task_type)].append(t)

    def _log(self, message: str, color: str = None):
        if not self.verbose:
            return
        prefix = "(Engine) "
        if color:
            print(f"{color}{prefix}{message}")
        else:
            print(f"{prefix}{message}")

    # --- fleet bookkeeping --------------------------------------------------

    def _add_vehicle(self, vt: VehicleType) -> VehicleInstance:
        vehicle = VehicleInstance(id=len(self.vehicles), vehicle_type=vt)
        self.vehicles.append(vehicle)
        self._fresh_vehicles[vt.id].append(vehicle)
        return vehicle

    def _add_module(self, mt: ModuleType) -> ModuleInstance:
        module = ModuleInstance(id=len(self.modules), module_type=mt)
        self.modules.append(module)
        self._fresh_modules[mt.task_type].append(module)
        return module

    def _drop_last_vehicle(self) -> None:
        vehicle = self.vehicles.pop()
        self._fresh_vehicles[vehicle.vehicle_type.id].pop()

    def _drop_last_module(self) -> None:
        module = self.modules.pop()
        self._fresh_modules[module.module_type.task_type].pop()

    def _travel(self, a: int, b: int) -> int:
        return self._minutes[a][b]

    def _window(self, tasks: Sequence[Task]) -> Tuple[int, int, int]:
        lead = tasks[0]
        minutes = self._travel(lead.origin, lead.destination)
        earliest = max(t.earliest_start for t in tasks)
        latest_start = min(t.latest_start_for(minutes) for t in tasks)
        deadline = min(t.latest_completion for t in tasks)
        return earliest, latest_start, deadline

    def _compatible(self, tasks: Sequence[Task]) -> Tuple[VehicleType, ...]:
        """Vehicle types able to carry the whole group, cheapest configuration first."""
        lead = tasks[0]
        key = (lead.task_type, tuple(t.size for t in tasks))
        types = self._compatible_cache.get(key)
        if types is None:
            module = self._module_type.get(lead.task_type) if self.catalog.is_modular else None
            if self.catalog.is_modular and module is None:
                types = ()
            else:
                types = tuple(
                    sorted(
                        (
                            vt
                            for vt in self.catalog.vehicle_types
                            if fits(vt, tasks) and all(can_serve(vt, module, t) for t in tasks)
                        ),
                        key=lambda vt: configured_cost(vt, module),
                    )
                )
            self._compatible_cache[key] = types
        return types

    # --- assignment options -------------------------------------------------

    @staticmethod
    def _first_ready(
        units: Iterable[VehicleInstance],
        minutes_to_origin: Sequence[int],
        earliest: int,
        latest_start: int,
        holding: Optional[TaskType] = None,
    ) -> Tuple[Optional[VehicleInstance], int]:
        """
        Earliest-starting unit of ``units`` (in deployment order, first wins
        ties). With ``holding`` only units still holding a module of that type count.
        """
        best, best_start = None, 0
        for v in units:
            if holding is not None and (v.module is None or v.module.module_type.task_type is not holding):
                continue
            start = v.free_at + minutes_to_origin[v.node]
            if start < earliest:
                start = earliest
            if start > latest_start:
                continue
            if best is None or start < best_start:
                best, best_start = v, start
                if start == earliest:
                    break
        return best, best_start

    def _best_option(self, tasks: Sequence[Task]) -> Optional[AssignmentOption]:
        earliest, latest_start, _ = self._window(tasks)
        if earliest > latest_start:
            return None
        types = self._compatible(tasks)
        origin = tasks[0].origin
        if not self.catalog.is_modular:
            return self._pick(self._fixed_options(types, origin, earliest, latest_start))

        task_type = tasks[0].task_type
        option = self._pick(self._fitted_options(types, task_type, origin, earliest, latest_start))
        if option is None and self.pickups:
            option = self._pick(self._pickup_options(types, task_type, origin, earliest, latest_start))
        return option

    def _pick(self, options: Iterable[AssignmentOption]) -> Optional[AssignmentOption]:
        return min(options, key=self.fleet_policy.rank, default=None)

    def _fixed_options(
        self, types: Sequence[VehicleType], origin: int, earliest: int, latest_start: int
    ) -> Iterator[AssignmentOption]:
        row = self._minutes[origin]
        for vt in types:
            v, start = self._first_ready(self._in_service[vt.id], row, earliest, latest_start)
            if v is not None:
                yield AssignmentOption(vehicle=v, start=start, departure=v.free_at, cost=vt.purchase_cost)
            fresh = self._fresh_vehicles[vt.id]
            if fresh:
                # Fresh units of one type are interchangeable; the lowest id stands for all.
                yield AssignmentOption(vehicle=fresh[0], start=earliest, departure=0, cost=vt.purchase_cost)

    def _fitted_options(
        self,
        types: Sequence[VehicleType],
        task_type: TaskType,
        origin: int,
        earliest: int,
        latest_start: int,
    ) -> Iterator[AssignmentOption]:
        row = self._minutes[origin]
        fresh_modules = self._fresh_modules[task_type]
        for vt in types:
            v, start = self._first_ready(self._in_service[vt.id], row, earliest, latest_start, task_type)
            if v is not None:
                yield AssignmentOption(
                    vehicle=v,
                    start=start,
                    departure=v.free_at,
                    cost=configured_cost(vt, v.module.module_type),
                    module=v.module,
                    module_source="held",
                )
            fresh = self._fresh_vehicles[vt.id]
            if fresh and fresh_modules:
                module = fresh_modules[0]
                yield AssignmentOption(
                    vehicle=fresh[0],
                    start=earliest,
                    departure=0,
                    cost=configured_cost(vt, module.module_type),
                    module=module,
                    module_source="fresh",
                )

    def _parked_by_node(self, task_type: TaskType) -> Dict[int, ModuleInstance]:
        """Per node, the parked module of ``task_type`` that frees up first."""
        return {
            node: min(modules, key=lambda m: (m.free_at, m.id))
            for node, modules in self._parked[task_type].items()
            if modules
        }

    def _pickup_options(
        self,
        types: Sequence[VehicleType],
        task_type: TaskType,
        origin: int,
        earliest: int,
        latest_start: int,
    ) -> Iterator[AssignmentOption]:
        row = self._minutes[origin]
        parked = self._parked_by_node(task_type)
        at_origin = parked.get(origin)
        fresh_modules = self._fresh_modules[task_type]
        fresh_module = fresh_modules[0] if fresh_modules else None

        for vt in types:
            best = None
            for v in self._in_service[vt.id]:
                pick = self._module_for(v, row, origin, parked.get(v.node), at_origin, fresh_module)
                if pick is None:
                    continue
                ready, departure, module, source = pick
                start = max(earliest, ready)
                if start > latest_start:
                    continue
                if best is None or start < best[0]:
                    best = (start, departure, v, module, source)
                    if start == earliest:
                        break
            if best is not None:
                start, departure, v, module, source = best
                yield AssignmentOption(
                    vehicle=v,
                    start=start,
                    departure=departure,
                    cost=configured_cost(vt, module.module_type),
                    module=module,
                    module_source=source,
                    reconfigure=True,
                )

            fresh = self._fresh_vehicles[vt.id]
            if fresh and at_origin is not None:
                start = max(earliest, at_origin.free_at)
                if start <= latest_start:
                    yield AssignmentOption(
                        vehicle=fresh[0],
                        start=start,
                        departure=0,
                        cost=configured_cost(vt, at_origin.module_type),
                        module=at_origin,
                        module_source="origin",
                    )

    @staticmethod
    def _module_for(
        v: VehicleInstance,
        minutes_to_origin: Sequence[int],
        origin: int,
        at_node: Optional[ModuleInstance],
        at_origin: Optional[ModuleInstance],
        fresh_module: Optional[ModuleInstance],
    ) -> Optional[Tuple[int, int, ModuleInstance, str]]:
        """
        Best module for an in-service unit: one parked at the task origin, one
        parked at the unit's node (taken along on the deadhead), or a fresh one.
        Returns (ready at origin, departure, module, source).
        """
        arrive = v.free_at + minutes_to_origin[v.node]
        picks = []
        if at_origin is not None:
            picks.append((max(arrive, at_origin.free_at), v.free_at, at_origin, "origin"))
        if at_node is not None and v.node != origin:
            leave = max(v.free_at, at_node.free_at)
            picks.append((leave + minutes_to_origin[v.node], leave, at_node, "carried"))
        if fresh_module is not None:
            picks.append((arrive, v.free_at, fresh_module, "fresh"))
        if not picks:
            return None
        return min(picks, key=lambda p: (p[0], p[2].fresh, p[2].id))

    # --- commitment ---------------------------------------------------------

    def _commit(self, tasks: Sequence[Task], option: AssignmentOption, clock: int) -> Trip:
        lead = tasks[0]
        origin, destination = lead.origin, lead.destination
        v = option.vehicle
        module = option.module
        _, _, deadline = self._window(tasks)

        deadhead: Route = ()
        busy_from = option.start
        if not v.fresh and v.node != origin:
            deadhead = shortest_route(self.graph, v.node, origin)
            busy_from = option.departure
            self.traffic.record_route(deadhead, option.departure, self.edge)

        if module is not None:
            self._take_module(v, option, origin)

        cost_basis = configured_cost(v.vehicle_type, module.module_type if module else None)
        chosen = select_route(
            route_candidates(self.graph, origin, destination),
            lead,
            clock,
            self.traffic,
            cost_basis,
            self.config,
            start=option.start,
            edge_minutes=self.edge,
            latest_completion=deadline,
        )
        if chosen is None:
            raise RuntimeError(f"{lead} was assigned a start with no on-time route")
        route, penalty = chosen

        minutes = (len(route) - 1) * self.edge
        departure = option.start + self.waiting
        self.traffic.record_route(route, departure, self.edge)
        completion = departure + minutes + self.waiting

        return_route = shortest_route(self.graph, destination, origin)
        self.traffic.record_route(return_route, completion, self.edge)
        busy_until = completion + self._travel(destination, origin)

        if v.fresh:
            self._fresh_vehicles[v.vehicle_type.id].remove(v)
            self._in_service[v.vehicle_type.id].append(v)
            v.deploy_seq = self._deployed
            self._deployed += 1
        v.node = origin
        v.free_at = busy_until
        v.trips += 1
        if module is not None:
            # Delivered: the module waits at the origin for any motive unit.
            module.node = origin
            module.free_at = completion
            self._parked[module.module_type.task_type][origin].append(module)

        trip = Trip(
            trip_id=len(self.trips),
            task_ids=tuple(t.id for t in tasks),
            vehicle_id=v.id,
            vehicle_label=v.label,
            module_id=module.id if module else None,
            route=tuple(route),
            deadhead=tuple(deadhead),
            return_route=tuple(return_route),
            busy_from=busy_from,
            start=option.start,
            window_arrival=option.start + minutes,
            completion=completion,
            busy_until=busy_until,
            penalty=penalty,
        )
        self.trips.append(trip)
        self.penalties.append(penalty)
        for t in tasks:
            partner = next((o.id for o in tasks if o.id != t.id), None)
            self.records[t.id] = TaskRecord(
                task_id=t.id,
                trip_id=trip.trip_id,
                vehicle_id=v.id,
                module_id=trip.module_id,
                route=trip.route,
                start=trip.start,
                window_arrival=trip.window_arrival,
                completion=completion,
                bundled_with=partner,
            )
        self.tracer.log_dispatch(trip)
        self._log(
            f"t={clock}: {'+'.join(f'T{t.id}' for t in tasks)} -> {v.label} "
            f"route {list(route)} start {option.start} completion {completion}",
            LogColors.SUCCESS,
        )
        return trip

    def _take_module(self, v: VehicleInstance, option: AssignmentOption, origin: int) -> None:
        module = option.module
        task_type = module.module_type.task_type
        if module.fresh:
            self._fresh_modules[task_type].remove(module)
        else:
            self._parked[task_type][module.node].remove(module)

        held = v.module
        if held is module:
            return
        if module.owner is not None:
            self.vehicles[module.owner].module = None
        if held is not None:
            held.owner = None
        if not v.fresh:
            node = origin if option.module_source == "origin" else v.node
            time = option.start if option.module_source == "origin" else option.departure
            self.tracer.log_reconfigure(time, option, held.label if held else "", node)
            self._log(
                f"{v.label} takes {module.label} at node {node}"
                + (f", leaving {held.label}" if held else ""),
                LogColors.INFO,
            )
        module.owner = v.id
        v.module = module

    def _commission_for(self, task: Task) -> Optional[AssignmentOption]:
        """Buys the cheapest addition that lets ``task`` be served."""
        earliest, latest_start, _ = self._window((task,))
        types = self._compatible((task,))
        if earliest > latest_start or not types:
            return None

        choices: List[Tuple[float, Optional[VehicleType], Optional[ModuleType]]] = []
        if self.catalog.is_modular:
            mt = self._module_type[task.task_type]
            choices += [(configured_cost(vt, mt), vt, mt) for vt in types]
            if self.pickups:
                choices += [(mt.cost, None, mt)]
                choices += [(vt.purchase_cost, vt, None) for vt in types]
        else:
            choices += [(vt.purchase_cost, vt, None) for vt in types]

        for _, vt, mt in sorted(choices, key=lambda c: c[0]):
            if vt is not None:
                self._add_vehicle(vt)
            if mt is not None:
                self._add_module(mt)
            option = self._best_option((task,))
            if option is not None:
                self.commissioned = self.commissioned.with_added(
                    vt.id if vt else None, mt.id if mt else None
                )
                self.tracer.log_commission(
                    task.earliest_start, task.id, vt.id if vt else "", mt.id if mt else ""
                )
                self._log(
                    f"Commissioned {vt.id if vt else ''} {mt.id if mt else ''} for {task}",
                    LogColors.WARNING,
                )
                return option
            if vt is not None:
                self._drop_last_vehicle()
            if mt is not None:
                self._drop_last_module()
        return None

    # --- event loop ---------------------------------------------------------

    def _partner_for(
        self, task: Task, option: AssignmentOption, pending: Dict[int, Task]
    ) -> Optional[Task]:
        vt = option.vehicle.vehicle_type
        if task.size is not TaskSize.MEDIUM or not fits(vt, (task, task)):
            return None

        def shares_trip(a: Task, b: Task) -> bool:
            if not fits(vt, (a, b)):
                return False
            earliest, latest_start, _ = self._window((a, b))
            return max(option.start, earliest) <= latest_start

        lane = self._lanes[(task.origin, task.destination, task.task_type)]
        return self.bundling.partner(task, (t for t in lane if t.id in pending), shares_trip)

    def _dispatch(self, task: Task, pending: Dict[int, Task]) -> None:
        clock = task.earliest_start

        option = self._best_option((task,))
        if option is None and self.commission:
            option = self._commission_for(task)
        if option is None:
            self.unserved.append(task.id)
            self.tracer.log_unserved(clock, task.id, "no unit can meet the window")
            self._log(f"t={clock}: {task} left unserved", LogColors.ERROR)
            return

        group: Tuple[Task, ...] = (task,)
        partner = self._partner_for(task, option, pending)
        if partner is not None:
            del pending[partner.id]
            option = replace(option, start=max(option.start, partner.earliest_start))
            group = (task, partner)
            self.tracer.log_bundle(clock, task.id, partner.id, option.vehicle.label)
        self._commit(group, option, clock)

    def run(self) -> ScheduleResult:
        pending = {t.id: t for t in self.scenario.tasks}
        heap = [(self.task_order.priority(t), t.id) for t in self.scenario.tasks]
        heapify(heap)
        while heap:
            _, task_id = heappop(heap)
            task = pending.pop(task_id, None)
            if task is None:
                continue  # already left on a bundled trip
            self._dispatch(task, pending)
        return self._result()

    def _result(self) -> ScheduleResult:
        tasks = {t.id: t for t in self.scenario.tasks}
        on_time = all(
            tasks[r.task_id].earliest_start <= r.start
            and r.window_arrival <= tasks[r.task_id].latest_completion
            for r in self.records.values()
        )
        effective = self.mix.merged(self.commissioned)
        acquisition = acquisition_cost(effective, self.catalog)
        penalty_total = math.fsum(self.penalties)
        return ScheduleResult(
            feasible=not self.unserved and on_time,
            unserved_tasks=tuple(sorted(self.unserved)),
            per_task=tuple(self.records[k] for k in sorted(self.records)),
            traffic_penalty_total=penalty_total,
            acquisition_cost=acquisition,
            objective_F=acquisition + penalty_total,
            crossings=self.traffic.total(),
            mix=effective,
            commissioned=self.commissioned,
            trips=tuple(self.trips),
        )

    def gantt(self, title: str = "Fleet schedule") -> str:
        return MermaidGanttGenerator(self.trips, title).generate()


def simulate(
    scenario: Scenario,
    mix: FleetMix,
    cat: FleetCatalog,
    cfg: Optional[DispatchConfig] = None,
    verbose: bool = False,
) -> ScheduleResult:
    return Engine(scenario, mix, cat, cfg, verbose=verbose).run()


def _repair_loop(
    scenario: Scenario,
    mix: FleetMix,
    cat: FleetCatalog,
    cfg: Optional[DispatchConfig],
    rounds: int,
    paired: bool,
) -> Tuple[FleetMix, ScheduleResult]:
    current = mix
    for _ in range(rounds):
        result = Engine(scenario, current, cat, cfg, commission=True, paired=paired).run()
        if result.commissioned.total_vehicles + result.commissioned.total_modules == 0:
            if result.unserved_tasks:
                break
            return current, result
        current = current.merged(result.commissioned)
    raise RepairFailureError(
        f"No feasible fleet mix for {scenario} after {rounds} repair rounds", rounds=rounds
    )


def repair(
    scenario: Scenario,
    mix: FleetMix,
    cat: FleetCatalog,
    cfg: Optional[DispatchConfig] = None,
    max_rounds: Optional[int] = None,
) -> Tuple[FleetMix, ScheduleResult]:
    """
    Repairs a mix until it serves every task: each round simulates in
    commission mode and adds whatever that run had to buy. The last round
    bought nothing, so its result is the plain simulation of the returned mix.

    A modular mix is repaired twice, once buying motive units only together
    with a module (the fixed fleet's purchases, unit for unit) and once
    letting units pick up parked modules first; the cheaper repair wins.
    """
    rounds = max_rounds if max_rounds is not None else 10 * max(1, len(scenario.tasks))
    if not cat.is_modular:
        return _repair_loop(scenario, mix, cat, cfg, rounds, paired=False)

    repaired = []
    failure = None
    for paired in (True, False):
        try:
            repaired.append(_repair_loop(scenario, mix, cat, cfg, rounds, paired=paired))
        except RepairFailureError as e:
            failure = e
    if not repaired:
        raise failure
    return min(repaired, key=lambda r: r[1].objective_F)


def min_feasible_additions(
    scenario: Scenario,
    mix: FleetMix,
    cat: FleetCatalog,
    cfg: Optional[DispatchConfig] = None,
    max_rounds: Optional[int] = None,
) -> FleetMix:
    """The repaired mix; ``mix`` itself when nothing was missing."""
    return repair(scenario, mix, cat, cfg, max_rounds)[0]
