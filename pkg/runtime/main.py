# main.py
import colorama
import numpy as np

from loader.reporter import Reporter
from MFMP.fleet import FleetMix, FleetMode, catalog_for
from MFMP.network import NetworkKind, build_network, traffic
from MFMP.task import Scenario, ScenarioConfig, generate_scenario
from runtime.engine import Engine, min_feasible_additions
from .policy import DispatchConfig
from .tracer import LogColors


def setup_scenario(seed: int = 7) -> Scenario:
    """Builds a ring network and a short, sparse mission on it."""
    print("-" * 25 + " 1. Building Network and Scenario " + "-" * 25)
    rng = np.random.default_rng(seed)
    graph = build_network(NetworkKind.RING, 10, rng)
    Reporter().network(graph, traffic(graph))
    scenario = generate_scenario(
        ScenarioConfig(horizon_min=30, inter_task_min=20, seed=seed), graph, rng
    )
    Reporter().scenario(scenario)
    return scenario


def repair_fleet(scenario: Scenario, mode: FleetMode, dispatch: DispatchConfig) -> FleetMix:
    """Grows an empty fleet until every task is served."""
    print("\n" + "-" * 25 + f" 2. Repairing an Empty {mode.value.title()} Fleet " + "-" * 25)
    cat = catalog_for(mode)
    mix = min_feasible_additions(scenario, FleetMix.empty(cat), cat, dispatch)
    Reporter().mix(mix, cat)
    return mix


def run_simulation(scenario: Scenario, mix: FleetMix, mode: FleetMode, dispatch: DispatchConfig) -> Engine:
    print("\n" + "-" * 25 + " 3. Running Simulation " + "-" * 25)
    engine = Engine(scenario, mix, catalog_for(mode), dispatch, verbose=True)
    Reporter().schedule(engine.run())
    return engine


def generate_report(engine: Engine):
    """Generates and displays the Mermaid Gantt chart."""
    print("\n" + "-" * 25 + " 4. Generating Report " + "-" * 25)
    mermaid_code = engine.gantt(f"{engine.catalog.mode.value} fleet")

    print("\nhttps://mermaid.live")
    print(f"{LogColors.INFO}{mermaid_code}")


if __name__ == "__main__":
    colorama.init(autoreset=True)

    dispatch = DispatchConfig(penalty_window_y_min=60)
    scenario = setup_scenario()
    for mode in FleetMode:
        mix = repair_fleet(scenario, mode, dispatch)
        engine = run_simulation(scenario, mix, mode, dispatch)
        generate_report(engine)

    colorama.deinit()
