# test_engine.py
from collections import defaultdict

import numpy as np
import pytest

from conftest import make_scenario, make_task
from MFMP.errors import InvalidArgumentError, RepairFailureError
from MFMP.fleet import FleetMix, FleetMode, catalog_for
from MFMP.network import NetworkKind, build_network, ring, route_candidates
from MFMP.task import FlexibilityMode, ScenarioConfig, StreamMode, TaskSize, TaskType, generate_scenario
from runtime.engine import Engine, min_feasible_additions, repair, route_penalty, select_route, simulate
from runtime.instances import TrafficLog
from runtime.policy import DispatchConfig


def random_case(seed: int, p_type1: float = 0.5):
    rng = np.random.default_rng(seed)
    kind = list(NetworkKind)[int(rng.integers(3))]
    g = build_network(kind, 8, rng)
    cfg = ScenarioConfig(
        horizon_min=60,
        stream_mode=StreamMode.GLOBAL,
        flexibility_mode=FlexibilityMode.PROPORTIONAL,
        flexibility_alpha=float(rng.choice([0.0, 0.5, 2.0])),
        p_type1=p_type1,
        seed=seed,
    )
    scenario = generate_scenario(cfg, g, rng)
    dispatch = DispatchConfig(penalty_window_y_min=int(rng.choice([0, 30, 120])))
    mode = FleetMode.MODULAR if rng.random() < 0.5 else FleetMode.FIXED
    return scenario, catalog_for(mode), dispatch


class TestRoutePenalty:
    def test_busiest_node_sets_the_penalty(self):
        log = TrafficLog(10)
        for node, count in ((0, 3), (1, 7), (2, 2)):
            for _ in range(count):
                log.record(node, 10)
        assert route_penalty((0, 1, 2), log, now=10, y=30, purchase_cost=1.0) == pytest.approx(0.007)

    def test_zero_window(self):
        log = TrafficLog(3)
        log.record(1, 5)
        assert route_penalty((0, 1, 2), log, now=5, y=0, purchase_cost=1.0) == 0.0

    def test_window_is_half_open(self):
        log = TrafficLog(5)
        for t in (5, 15, 25):
            log.record(4, t)
        assert log.count(4, now=30, window=12) == 1
        assert log.count(4, now=25, window=10) == 1
        assert log.count(4, now=25, window=11) == 2

    def test_negative_window(self):
        with pytest.raises(InvalidArgumentError):
            route_penalty((0, 1), TrafficLog(2), now=0, y=-1, purchase_cost=1.0)


class TestSelectRoute:
    def test_cold_route_beats_hot_route_of_equal_length(self):
        g = ring(4)
        log = TrafficLog(4)
        for _ in range(9):
            log.record(1, 5)
        task = make_task(0, 0, 2, earliest_start=10, duration=60)
        route, penalty = select_route(
            route_candidates(g, 0, 2), task, 10, log, 1.0,
            DispatchConfig(penalty_window_y_min=60), start=10, edge_minutes=30,
        )
        assert route == (0, 3, 2)
        assert penalty == 0.0

    def _hot_ring(self):
        log = TrafficLog(10)
        for _ in range(9):
            log.record(1, 0)
        task = make_task(0, 0, 2, earliest_start=0, duration=240)
        return route_candidates(ring(10), 0, 2), task, log

    def test_longest_route_avoids_the_hot_node(self):
        candidates, task, log = self._hot_ring()
        route, penalty = select_route(
            candidates, task, 0, log, 1.0, DispatchConfig(penalty_window_y_min=60),
            start=0, edge_minutes=30,
        )
        assert len(route) - 1 == 8
        assert penalty == 0.0

    def test_time_weight_keeps_the_short_route(self):
        candidates, task, log = self._hot_ring()
        cfg = DispatchConfig(penalty_window_y_min=60, time_weight=0.001)
        route, penalty = select_route(candidates, task, 0, log, 1.0, cfg, start=0, edge_minutes=30)
        assert route == (0, 1, 2)
        assert penalty == pytest.approx(0.009)

    def test_window_rules_out_long_routes(self):
        candidates, task, log = self._hot_ring()
        cfg = DispatchConfig(penalty_window_y_min=60)
        route, _ = select_route(candidates, task, 0, log, 1.0, cfg, start=0, edge_minutes=30, latest_completion=60)
        assert route == (0, 1, 2)
        assert select_route(candidates, task, 0, log, 1.0, cfg, start=0, edge_minutes=30, latest_completion=30) is None

    def test_zero_window_takes_the_shortest(self):
        candidates, task, log = self._hot_ring()
        assert select_route(candidates, task, 0, log, 1.0, DispatchConfig(), start=0, edge_minutes=30) == (
            (0, 1, 2),
            0.0,
        )


class TestSimulate:
    def test_single_task_timing(self, fixed_cat, modular_cat):
        task = make_task(0, 0, 3, earliest_start=100, duration=210)
        scenario = make_scenario([task])

        fixed = simulate(scenario, FleetMix.of(fixed_cat, medium_type1=1), fixed_cat)
        record = fixed.record(0)
        assert fixed.feasible
        assert record.route == (0, 1, 2, 3)
        assert record.start == 100
        assert record.window_arrival == 190
        assert record.completion == 100 + 2 * 30 + 90

        mix = FleetMix.of(modular_cat, medium_motive=1, module_type1=1)
        modular = simulate(scenario, mix, modular_cat)
        assert modular.feasible
        assert modular.record(0).completion == 100 + 2 * 5 + 90

    def test_heavy_vehicle_carries_two_medium_loads(self, fixed_cat):
        tasks = [
            make_task(0, 0, 3, earliest_start=0, duration=210),
            make_task(1, 0, 3, earliest_start=10, duration=210),
        ]
        result = simulate(make_scenario(tasks), FleetMix.of(fixed_cat, heavy_type1=1), fixed_cat)
        assert result.feasible
        assert len(result.trips) == 1
        assert result.trips[0].task_ids == (0, 1)
        assert result.record(0).bundled_with == 1
        assert result.record(1).start == 10

    def test_empty_fleet_serves_nothing(self, fixed_cat):
        tasks = [make_task(0, 0, 3), make_task(1, 4, 5, earliest_start=3)]
        result = simulate(make_scenario(tasks), FleetMix.empty(fixed_cat), fixed_cat)
        assert not result.feasible
        assert result.unserved_tasks == (0, 1)
        assert result.objective_F == 0.0

    def test_congested_route_is_avoided(self, fixed_cat):
        tasks = [
            make_task(0, 0, 3, earliest_start=0, duration=210),
            make_task(1, 0, 3, earliest_start=100, duration=210),
        ]
        mix = FleetMix.of(fixed_cat, medium_type1=2)
        cfg = DispatchConfig(penalty_window_y_min=60, bundling="none")

        result = simulate(make_scenario(tasks), mix, fixed_cat, cfg)
        assert result.record(0).route == (0, 1, 2, 3)
        assert result.record(1).route == (0, 9, 8, 7, 6, 5, 4, 3)
        assert result.objective_F == pytest.approx(2.0)

        weighted = DispatchConfig(penalty_window_y_min=60, bundling="none", time_weight=0.001)
        result = simulate(make_scenario(tasks), mix, fixed_cat, weighted)
        assert result.record(1).route == (0, 1, 2, 3)
        assert result.traffic_penalty_total == pytest.approx(0.001)
        assert result.objective_F == pytest.approx(2.001)

    def test_delivered_module_waits_at_the_origin(self, modular_cat):
        tasks = [
            make_task(0, 0, 5, earliest_start=0, duration=150),
            make_task(1, 0, 5, earliest_start=200, duration=150),
        ]
        mix = FleetMix.of(modular_cat, medium_motive=2, module_type1=1)
        result = simulate(make_scenario(tasks), mix, modular_cat)

        assert result.feasible
        first, second = result.record(0), result.record(1)
        assert first.completion == 160
        assert second.start == 200
        assert second.module_id == first.module_id
        assert second.vehicle_id != first.vehicle_id

    def test_gantt_lists_each_vehicle(self, fixed_cat):
        tasks = [make_task(0, 0, 3), make_task(1, 5, 6, task_type=TaskType.TYPE2)]
        engine = Engine(make_scenario(tasks), FleetMix.of(fixed_cat, medium_type1=1, medium_type2=1), fixed_cat)
        engine.run()
        chart = engine.gantt("demo")
        assert chart.startswith("gantt")
        assert "section medium_type1-000" in chart
        assert "section medium_type2-001" in chart
        assert len(engine.tracer.events("DISPATCH")) == 2


class TestPolicies:
    def test_deadline_order_serves_the_urgent_task_first(self, fixed_cat):
        tasks = [
            make_task(0, 0, 1, earliest_start=0, duration=30, flexibility=1000),
            make_task(1, 0, 1, earliest_start=0, duration=30),
        ]
        scenario = make_scenario(tasks)
        mix = FleetMix.of(fixed_cat, medium_type1=1)

        edf = simulate(scenario, mix, fixed_cat, DispatchConfig(task_order="edf"))
        assert edf.feasible
        assert edf.record(1).start == 0
        assert edf.record(0).start == 120

        fifo = simulate(scenario, mix, fixed_cat, DispatchConfig(task_order="fifo"))
        assert fifo.unserved_tasks == (1,)
        assert fifo.record(0).start == 0

    def test_earliest_start_takes_the_idle_heavy_vehicle(self, fixed_cat):
        tasks = [
            make_task(0, 0, 3, earliest_start=0, duration=210),
            make_task(1, 0, 3, earliest_start=100, duration=210, flexibility=300),
        ]
        scenario = make_scenario(tasks)
        mix = FleetMix.of(fixed_cat, medium_type1=1, heavy_type1=1)

        cheapest = simulate(scenario, mix, fixed_cat)
        assert cheapest.record(0).vehicle_id == cheapest.record(1).vehicle_id == 0
        assert cheapest.record(1).start == 240

        earliest = simulate(scenario, mix, fixed_cat, DispatchConfig(fleet_policy="earliest_start"))
        assert earliest.record(0).vehicle_id == 0
        assert earliest.record(1).vehicle_id == 1
        assert earliest.record(1).start == 100
        assert earliest.acquisition_cost == cheapest.acquisition_cost
        assert earliest.feasible and cheapest.feasible

    def test_bundling_can_be_switched_off(self, fixed_cat):
        tasks = [
            make_task(0, 0, 3, earliest_start=0, duration=210),
            make_task(1, 0, 3, earliest_start=10, duration=210),
        ]
        mix = FleetMix.of(fixed_cat, heavy_type1=2)
        result = simulate(make_scenario(tasks), mix, fixed_cat, DispatchConfig(bundling="none"))
        assert len(result.trips) == 2
        assert result.record(0).vehicle_id != result.record(1).vehicle_id


class TestRepair:
    def test_single_task_fixed(self, fixed_cat):
        scenario = make_scenario([make_task(0, 0, 3)])
        mix = min_feasible_additions(scenario, FleetMix.empty(fixed_cat), fixed_cat)
        assert mix == FleetMix.of(fixed_cat, medium_type1=1)

    def test_single_task_modular(self, modular_cat):
        scenario = make_scenario([make_task(0, 0, 3)])
        mix = min_feasible_additions(scenario, FleetMix.empty(modular_cat), modular_cat)
        assert mix == FleetMix.of(modular_cat, medium_motive=1, module_type1=1)

    def test_feasible_mix_is_a_fixed_point(self, fixed_cat):
        scenario = make_scenario([make_task(0, 0, 3), make_task(1, 0, 3, size=TaskSize.HEAVY)])
        mix = FleetMix.of(fixed_cat, medium_type1=1, heavy_type1=1)
        assert min_feasible_additions(scenario, mix, fixed_cat) == mix

    def test_round_cap(self, fixed_cat):
        scenario = make_scenario([make_task(0, 0, 3)])
        with pytest.raises(RepairFailureError) as info:
            repair(scenario, FleetMix.empty(fixed_cat), fixed_cat, max_rounds=1)
        assert info.value.rounds == 1

    def test_module_swap_beats_a_second_fixed_vehicle(self, fixed_cat, modular_cat):
        tasks = [
            make_task(0, 0, 1, earliest_start=0, duration=270),
            make_task(1, 0, 1, earliest_start=500, duration=270, task_type=TaskType.TYPE2),
        ]
        scenario = make_scenario(tasks)

        fixed_mix, fixed = repair(scenario, FleetMix.empty(fixed_cat), fixed_cat)
        modular_mix, modular = repair(scenario, FleetMix.empty(modular_cat), modular_cat)

        assert fixed_mix == FleetMix.of(fixed_cat, medium_type1=1, medium_type2=1)
        assert fixed.objective_F == pytest.approx(2.0)
        assert modular_mix == FleetMix.of(modular_cat, medium_motive=1, module_type1=1, module_type2=1)
        assert modular.objective_F == pytest.approx(1.05)

        engine = Engine(scenario, modular_mix, modular_cat)
        assert engine.run().feasible
        swaps = engine.tracer.events("RECONFIGURE")
        assert len(swaps) == 1
        assert swaps[0].details["node"] == 0


class TestProperties:
    def test_same_inputs_same_result(self):
        for seed in range(50):
            scenario, cat, dispatch = random_case(seed)
            mix, _ = repair(scenario, FleetMix.empty(cat), cat, dispatch)
            first = simulate(scenario, mix, cat, dispatch).to_dict()
            second = simulate(scenario, mix, cat, dispatch).to_dict()
            assert first == second

    def test_schedules_are_consistent(self):
        for seed in range(30):
            scenario, cat, dispatch = random_case(seed)
            mix, result = repair(scenario, FleetMix.empty(cat), cat, dispatch)
            assert result.feasible
            assert result.crossings == sum(trip.node_crossings for trip in result.trips)

            tasks = {t.id: t for t in scenario.tasks}
            for record in result.per_task:
                task = tasks[record.task_id]
                assert task.earliest_start <= record.start
                assert record.window_arrival <= task.latest_completion

            by_vehicle = defaultdict(list)
            for trip in result.trips:
                by_vehicle[trip.vehicle_id].append(trip)
            for trips in by_vehicle.values():
                trips.sort(key=lambda t: t.busy_from)
                for before, after in zip(trips, trips[1:]):
                    assert before.busy_until <= after.busy_from

            if dispatch.penalty_window_y_min == 0:
                assert result.objective_F == result.acquisition_cost

    def test_modular_never_costs_more_than_fixed(self):
        fixed_cat, modular_cat = catalog_for(FleetMode.FIXED), catalog_for(FleetMode.MODULAR)
        for y in (0, 60):
            equal_waits = DispatchConfig(waiting_fixed_min=30, waiting_modular_min=30, penalty_window_y_min=y)
            for seed in range(50):
                scenario, _, _ = random_case(seed)
                _, fixed = repair(scenario, FleetMix.empty(fixed_cat), fixed_cat, equal_waits)
                _, modular = repair(scenario, FleetMix.empty(modular_cat), modular_cat, equal_waits)
                assert modular.objective_F <= fixed.objective_F + 1e-9, (seed, y)

    def test_surplus_fresh_units_change_only_the_price(self, fixed_cat):
        surplus = FleetMix.of(fixed_cat, medium_type1=500, medium_type2=500, heavy_type1=500, heavy_type2=500)

        def schedule(result):
            return [{k: v for k, v in r.to_dict().items() if k != "vehicle_id"} for r in result.per_task]

        for seed in range(5):
            scenario, _, dispatch = random_case(seed)
            mix, lean = repair(scenario, FleetMix.empty(fixed_cat), fixed_cat, dispatch)
            padded = simulate(scenario, mix.merged(surplus), fixed_cat, dispatch)
            assert padded.feasible
            assert schedule(padded) == schedule(lean)
            assert padded.traffic_penalty_total == lean.traffic_penalty_total
