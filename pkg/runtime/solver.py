# solver.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from MFMP.errors import EmptyArchiveError, InvalidArgumentError, RepairFailureError
from MFMP.fleet import FleetCatalog, FleetMix, diversity, lane_meters
from MFMP.task import Scenario

from .engine import repair
from .policy import DispatchConfig
from .tracer import LogColors


@dataclass(frozen=True)
class Objectives:
    """The three minimized objectives: cost F, type diversity and lane meters."""

    F: float
    diversity: float
    lane: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.F, self.diversity, self.lane))

    def __len__(self) -> int:
        return 3


@dataclass(frozen=True)
class Individual:
    mix: FleetMix
    objectives: Objectives
    feasible: bool = True

    def __repr__(self):
        o = self.objectives
        return f"Individual({self.mix}, F={o.F:.4f}, diversity={o.diversity:.3f}, lane={o.lane:.1f})"


@dataclass
class SolverConfig:
    population_size: int = 20
    generations: int = 100
    mutation_rate: float = 0.2
    crossover_rate: float = 0.9
    epsilon: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: int = 0
    initial_density: float = 0.3
    initial_max_count: int = 2

    def __post_init__(self) -> None:
        self.epsilon = tuple(float(e) for e in self.epsilon)
        if self.population_size < 2:
            raise InvalidArgumentError(
                f"SolverConfig.population_size must be >= 2, got {self.population_size}"
            )
        if self.generations < 0:
            raise InvalidArgumentError(f"SolverConfig.generations must be >= 0, got {self.generations}")
        for name in ("mutation_rate", "crossover_rate", "initial_density"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidArgumentError(
                    f"SolverConfig.{name} must lie in [0, 1], got {getattr(self, name)}"
                )
        if len(self.epsilon) != 3 or any(e < 0 for e in self.epsilon):
            raise InvalidArgumentError(
                f"SolverConfig.epsilon must be three values >= 0, got {self.epsilon}"
            )
        if self.initial_max_count < 1:
            raise InvalidArgumentError(
                f"SolverConfig.initial_max_count must be >= 1, got {self.initial_max_count}"
            )


def dominates(a: Sequence[float], b: Sequence[float], epsilon: Optional[Sequence[float]] = None) -> bool:
    """
    Additive epsilon-dominance for minimized objectives: ``a`` is no worse than
    ``b`` relaxed by epsilon everywhere and strictly better somewhere.
    """
    a, b = tuple(a), tuple(b)
    eps = tuple(epsilon) if epsilon is not None else (0.0,) * len(a)
    if not len(a) == len(b) == len(eps):
        raise InvalidArgumentError(
            f"Objective arity mismatch: {len(a)} vs {len(b)} (epsilon {len(eps)})"
        )
    return all(x <= y + e for x, y, e in zip(a, b, eps)) and any(
        x < y + e for x, y, e in zip(a, b, eps)
    )


class ParetoArchive:
    """Mutually non-dominated feasible individuals, at most one per mix."""

    def __init__(self, epsilon: Sequence[float] = (0.0, 0.0, 0.0)):
        self.epsilon = tuple(epsilon)
        self._members: List[Individual] = []

    def insert(self, candidate: Individual) -> bool:
        if not candidate.feasible:
            return False
        key = candidate.mix.key()
        for member in self._members:
            if member.mix.key() == key:
                return False
            if dominates(member.objectives, candidate.objectives, self.epsilon):
                return False
        self._members = [
            m for m in self._members if not dominates(candidate.objectives, m.objectives, self.epsilon)
        ]
        self._members.append(candidate)
        return True

    @property
    def members(self) -> Tuple[Individual, ...]:
        return tuple(self._members)

    def is_mutually_non_dominated(self) -> bool:
        return not any(
            dominates(a.objectives, b.objectives, self.epsilon)
            for a in self._members
            for b in self._members
            if a is not b
        )

    def min_F(self) -> float:
        if not self._members:
            raise EmptyArchiveError("The archive is empty")
        return min(m.objectives.F for m in self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __repr__(self):
        return f"ParetoArchive({len(self._members)} members, epsilon={self.epsilon})"


@dataclass
class SolverDiagnostics:
    evaluations: int = 0
    cache_hits: int = 0
    repair_failures: int = 0
    min_F_per_generation: List[float] = field(default_factory=list)


GenerationCallback = Callable[[int, ParetoArchive, SolverDiagnostics], None]


class Solver:
    """
    Evolutionary search over fleet mixes: tournament selection on dominance,
    uniform crossover and unit mutation of the counts, repair to feasibility and
    an elitist Pareto archive.
    """

    def __init__(
        self,
        scenario: Scenario,
        catalog: FleetCatalog,
        dispatch: Optional[DispatchConfig] = None,
        config: Optional[SolverConfig] = None,
        rng: Optional[np.random.Generator] = None,
        verbose: bool = False,
        on_generation: Optional[GenerationCallback] = None,
    ):
        self.scenario = scenario
        self.catalog = catalog
        self.dispatch = dispatch or DispatchConfig()
        self.config = config or SolverConfig()
        self.rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        self.verbose = verbose
        self.on_generation = on_generation
        self.archive = ParetoArchive(self.config.epsilon)
        self.diagnostics = SolverDiagnostics()
        self._cache: Dict[Tuple, Optional[Individual]] = {}
        self._type_ids = [v.id for v in catalog.vehicle_types] + [m.id for m in catalog.module_types]

    def _log(self, message: str, color: str = None):
        if not self.verbose:
            return
        prefix = "(Solver) "
        if color:
            print(f"{color}{prefix}{message}")
        else:
            print(f"{prefix}{message}")

    def _counts(self, mix: FleetMix) -> List[int]:
        return [mix.vehicle_counts.get(k, mix.module_counts.get(k, 0)) for k in self._type_ids]

    def _mix(self, counts: Sequence[int]) -> FleetMix:
        return FleetMix.of(self.catalog, **dict(zip(self._type_ids, (int(c) for c in counts))))

    def evaluate(self, mix: FleetMix) -> Optional[Individual]:
        """Repairs and scores a mix; None when repair gives up."""
        key = mix.key()
        if key in self._cache:
            self.diagnostics.cache_hits += 1
            return self._cache[key]
        try:
            repaired, result = repair(self.scenario, mix, self.catalog, self.dispatch)
        except RepairFailureError as e:
            self.diagnostics.repair_failures += 1
            self._log(f"Discarded {mix}: {e}", LogColors.WARNING)
            self._cache[key] = None
            return None

        repaired_key = repaired.key()
        if repaired_key in self._cache and self._cache[repaired_key] is not None:
            individual = self._cache[repaired_key]
            self.diagnostics.cache_hits += 1
        else:
            self.diagnostics.evaluations += 1
            individual = Individual(
                mix=repaired,
                objectives=Objectives(
                    F=result.objective_F,
                    diversity=diversity(repaired),
                    lane=lane_meters(repaired, self.catalog),
                ),
                feasible=result.feasible,
            )
            self._cache[repaired_key] = individual
        self._cache[key] = individual
        return individual

    def _random_mix(self) -> FleetMix:
        cfg = self.config
        counts = [
            int(self.rng.integers(1, cfg.initial_max_count + 1))
            if self.rng.random() < cfg.initial_density
            else 0
            for _ in self._type_ids
        ]
        return self._mix(counts)

    def _tournament(self, pool: Sequence[Individual]) -> Individual:
        i, j = (int(x) for x in self.rng.integers(len(pool), size=2))
        a, b = pool[i], pool[j]
        if dominates(a.objectives, b.objectives, self.config.epsilon):
            return a
        if dominates(b.objectives, a.objectives, self.config.epsilon):
            return b
        return a if a.objectives.F <= b.objectives.F else b

    def _crossover(self, a: FleetMix, b: FleetMix) -> FleetMix:
        if self.rng.random() >= self.config.crossover_rate:
            return a
        ca, cb = self._counts(a), self._counts(b)
        return self._mix([x if self.rng.random() < 0.5 else y for x, y in zip(ca, cb)])

    def _mutate(self, mix: FleetMix) -> FleetMix:
        counts = self._counts(mix)
        for i, count in enumerate(counts):
            if self.rng.random() < self.config.mutation_rate:
                step = 1 if self.rng.random() < 0.5 else -1
                counts[i] = max(0, count + step)
        return self._mix(counts)

    def _close_generation(self, generation: int) -> None:
        best = self.archive.min_F() if len(self.archive) else float("inf")
        self.diagnostics.min_F_per_generation.append(best)
        self._log(
            f"Generation {generation}: archive {len(self.archive)}, min F {best:.4f}",
            LogColors.INFO,
        )
        if self.on_generation is not None:
            self.on_generation(generation, self.archive, self.diagnostics)

    def run(self) -> ParetoArchive:
        cfg = self.config
        population: List[Individual] = []
        seeds = [FleetMix.empty(self.catalog)]
        seeds += [self._random_mix() for _ in range(cfg.population_size - 1)]
        for mix in seeds:
            individual = self.evaluate(mix)
            if individual is not None:
                population.append(individual)
                self.archive.insert(individual)
        self._close_generation(0)

        for generation in range(1, cfg.generations + 1):
            pool = population + list(self.archive.members)
            if not pool:
                break
            offspring: List[Individual] = []
            attempts = 0
            while len(offspring) < cfg.population_size and attempts < 10 * cfg.population_size:
                attempts += 1
                child = self._mutate(self._crossover(self._tournament(pool).mix, self._tournament(pool).mix))
                individual = self.evaluate(child)
                if individual is None:
                    continue
                offspring.append(individual)
                self.archive.insert(individual)
            if offspring:
                population = offspring
            self._close_generation(generation)

        self._log(
            f"Done: {self.diagnostics.evaluations} evaluations, "
            f"{self.diagnostics.cache_hits} cache hits, "
            f"{self.diagnostics.repair_failures} repair failures",
            LogColors.SUCCESS,
        )
        return self.archive


def evolve(
    scenario: Scenario,
    cat: FleetCatalog,
    dcfg: Optional[DispatchConfig] = None,
    scfg: Optional[SolverConfig] = None,
    rng: Optional[np.random.Generator] = None,
    verbose: bool = False,
    on_generation: Optional[GenerationCallback] = None,
) -> ParetoArchive:
    return Solver(scenario, cat, dcfg, scfg, rng, verbose, on_generation).run()


def best_cost(archive: ParetoArchive) -> Individual:
    """The member with the lowest F; ties go to lane, then diversity, then mix order."""
    if not len(archive):
        raise EmptyArchiveError("best_cost needs a non-empty archive")
    return min(
        archive.members,
        key=lambda m: (m.objectives.F, m.objectives.lane, m.objectives.diversity, m.mix.key()),
    )
