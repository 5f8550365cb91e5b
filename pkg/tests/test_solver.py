# test_solver.py
import itertools

import numpy as np
import pytest

from conftest import make_scenario, make_task
from MFMP.errors import EmptyArchiveError, InvalidArgumentError
from MFMP.fleet import FleetMix, FleetMode, acquisition_cost, catalog_for
from MFMP.network import NetworkKind, build_network, longest_route_hops
from MFMP.task import TaskSize, TaskType
from runtime.engine import simulate
from runtime.policy import DispatchConfig
from runtime.solver import (
    Individual,
    Objectives,
    ParetoArchive,
    Solver,
    SolverConfig,
    best_cost,
    dominates,
    evolve,
)


def individual(cat, F, diversity=0.0, lane=0.0, feasible=True, **counts):
    return Individual(FleetMix.of(cat, **counts), Objectives(F, diversity, lane), feasible)


def tiny_scenario(seed: int):
    rng = np.random.default_rng(seed)
    g = build_network(NetworkKind.SW1, 6, rng)
    tasks = []
    for task_id in range(int(rng.integers(1, 4))):
        origin, destination = (int(v) for v in rng.choice(6, size=2, replace=False))
        tasks.append(
            make_task(
                task_id,
                origin,
                destination,
                earliest_start=int(rng.integers(0, 61)),
                task_type=TaskType.TYPE1 if rng.random() < 0.5 else TaskType.TYPE2,
                size=TaskSize.HEAVY if rng.random() < 0.5 else TaskSize.MEDIUM,
                duration=30 * longest_route_hops(g, origin, destination),
            )
        )
    return make_scenario(tasks, graph=g)


def cheapest_feasible(scenario, cat, dispatch, max_count=3):
    type_ids = [v.id for v in cat.vehicle_types] + [m.id for m in cat.module_types]
    best = None
    for counts in itertools.product(range(max_count + 1), repeat=len(type_ids)):
        mix = FleetMix.of(cat, **dict(zip(type_ids, counts)))
        cost = acquisition_cost(mix, cat)
        if best is not None and cost >= best:
            continue
        if simulate(scenario, mix, cat, dispatch).feasible:
            best = cost
    return best


class TestDominance:
    def test_examples(self):
        assert dominates((1, 1, 1), (2, 2, 2))
        assert dominates((1, 2, 2), (2, 2, 2))
        assert not dominates((2, 2, 2), (1, 1, 1))
        assert not dominates((1, 2, 1), (2, 1, 1))
        assert not dominates((2, 1, 1), (1, 2, 1))

    def test_epsilon_relaxes_the_comparison(self):
        assert not dominates((1.05, 1, 1), (1, 1, 1))
        assert dominates((1.05, 1, 1), (1, 1, 1), epsilon=(0.1, 0, 0))

    def test_laws(self):
        rng = np.random.default_rng(21)
        vectors = [tuple(int(x) for x in rng.integers(0, 3, size=3)) for _ in range(60)]
        for a in vectors:
            assert not dominates(a, a)
        for a, b, c in itertools.product(vectors[:25], repeat=3):
            if dominates(a, b) and dominates(b, c):
                assert dominates(a, c)
            assert not (dominates(a, b) and dominates(b, a))

    def test_arity(self):
        with pytest.raises(InvalidArgumentError):
            dominates((1, 2), (1, 2, 3))


class TestArchive:
    def test_insert_rules(self, fixed_cat):
        archive = ParetoArchive()
        assert archive.insert(individual(fixed_cat, 2.0, 1.0, 18.0, medium_type1=2))
        assert not archive.insert(individual(fixed_cat, 3.0, 1.0, 20.0, medium_type1=3))
        assert not archive.insert(individual(fixed_cat, 1.0, 0.0, 0.0, False, heavy_type1=1))
        assert not archive.insert(individual(fixed_cat, 1.0, 0.0, 0.0, medium_type1=2))
        assert archive.insert(individual(fixed_cat, 2.5, 0.5, 18.0, medium_type1=1, medium_type2=1))
        assert len(archive) == 2

        assert archive.insert(individual(fixed_cat, 1.5, 0.5, 12.0, heavy_type1=1))
        assert len(archive) == 1
        assert archive.min_F() == 1.5
        assert archive.is_mutually_non_dominated()

    def test_best_cost_breaks_ties_on_lane(self, fixed_cat):
        archive = ParetoArchive()
        archive.insert(individual(fixed_cat, 2.0, 0.5, 21.0, medium_type1=1, heavy_type1=1))
        archive.insert(individual(fixed_cat, 2.0, 1.0, 18.0, medium_type1=2))
        archive.insert(individual(fixed_cat, 3.0, 0.0, 9.0, medium_type1=1))
        assert best_cost(archive).mix == FleetMix.of(fixed_cat, medium_type1=2)

    def test_empty(self):
        with pytest.raises(EmptyArchiveError):
            best_cost(ParetoArchive())
        with pytest.raises(EmptyArchiveError):
            ParetoArchive().min_F()


class TestSolver:
    def test_config_validation(self):
        with pytest.raises(InvalidArgumentError):
            SolverConfig(population_size=1)
        with pytest.raises(InvalidArgumentError):
            SolverConfig(epsilon=(0.1, -1.0, 0.0))

    def test_zero_generations_keeps_the_repaired_start(self, fixed_cat):
        scenario = make_scenario([make_task(0, 0, 3)])
        solver = Solver(scenario, fixed_cat, config=SolverConfig(generations=0, seed=1))
        archive = solver.run()
        assert len(archive) >= 1
        assert best_cost(archive).objectives.F == pytest.approx(1.0)
        assert len(solver.diagnostics.min_F_per_generation) == 1

    def test_archive_invariants_hold_every_generation(self, modular_cat):
        scenario = tiny_scenario(4)
        dispatch = DispatchConfig(penalty_window_y_min=60)
        seen = []

        def check(generation, archive, diagnostics):
            assert archive.is_mutually_non_dominated()
            assert len(diagnostics.min_F_per_generation) == generation + 1
            seen.append(generation)

        archive = evolve(
            scenario, modular_cat, dispatch, SolverConfig(population_size=8, generations=5, seed=3),
            on_generation=check,
        )
        assert seen == list(range(6))
        for member in archive.members:
            result = simulate(scenario, member.mix, modular_cat, dispatch)
            assert result.feasible
            assert result.objective_F == member.objectives.F

    def test_best_cost_never_rises_across_generations(self, fixed_cat):
        solver = Solver(tiny_scenario(8), fixed_cat, config=SolverConfig(population_size=8, generations=6, seed=2))
        solver.run()
        history = solver.diagnostics.min_F_per_generation
        assert history == sorted(history, reverse=True)

    def test_same_seed_same_archive(self, fixed_cat):
        scenario = tiny_scenario(5)
        config = SolverConfig(population_size=6, generations=4, seed=9)
        first = evolve(scenario, fixed_cat, scfg=config)
        second = evolve(scenario, fixed_cat, scfg=config)
        assert [m.mix.key() for m in first.members] == [m.mix.key() for m in second.members]

    @pytest.mark.parametrize("mode", list(FleetMode))
    def test_matches_exhaustive_search(self, mode):
        cat = catalog_for(mode)
        dispatch = DispatchConfig()
        config = SolverConfig(population_size=30, generations=40, initial_density=0.5, seed=0)
        for seed in range(20):
            scenario = tiny_scenario(seed)
            found = best_cost(evolve(scenario, cat, dispatch, config)).objectives.F
            assert found == pytest.approx(cheapest_feasible(scenario, cat, dispatch), abs=1e-12)
