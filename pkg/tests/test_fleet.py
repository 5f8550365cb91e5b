# test_fleet.py
from dataclasses import replace

import numpy as np
import pytest

from conftest import make_task
from MFMP.errors import InvalidArgumentError
from MFMP.fleet import (
    CatalogCosts,
    FleetCatalog,
    FleetMix,
    FleetMode,
    acquisition_cost,
    bundle_capacity,
    can_serve,
    catalog_for,
    check_cost_parity,
    configured_cost,
    diversity,
    fits,
    fixed_catalog,
    lane_meters,
)
from MFMP.task import TaskSize, TaskType


def test_catalog_shapes(fixed_cat, modular_cat):
    assert len(fixed_cat.vehicle_types) == 4
    assert fixed_cat.module_types == ()
    assert len(modular_cat.vehicle_types) == 2
    assert len(modular_cat.module_types) == 2


@pytest.mark.parametrize("size", ["medium", "heavy"])
def test_motive_plus_module_equals_fixed(fixed_cat, modular_cat, size):
    fixed = fixed_cat.vehicle_type(f"{size}_type1")
    motive = modular_cat.vehicle_type(f"{size}_motive")
    module = modular_cat.module_type("module_type1")
    assert configured_cost(motive, module) == pytest.approx(fixed.purchase_cost)


def test_costs_must_balance():
    with pytest.raises(InvalidArgumentError):
        CatalogCosts(module=0.1)


def test_acquisition_cost(fixed_cat, modular_cat):
    assert acquisition_cost(FleetMix.empty(fixed_cat), fixed_cat) == 0.0

    costs = CatalogCosts(medium_motive=0.95, heavy_motive=1.55, module=0.05)
    modular = catalog_for(FleetMode.MODULAR, costs)
    mix = FleetMix.of(modular, medium_motive=2, heavy_motive=1, module_type1=3)
    assert acquisition_cost(mix, modular) == pytest.approx(2 * 0.95 + 1.55 + 3 * 0.05)

    fixed_mix = FleetMix.of(fixed_cat, medium_type1=2, heavy_type2=1)
    assert acquisition_cost(fixed_mix, fixed_cat) == pytest.approx(3.6)


def test_modular_single_vehicle_costs_as_much_as_fixed(fixed_cat, modular_cat):
    modular = FleetMix.of(modular_cat, medium_motive=1, module_type1=1)
    fixed = FleetMix.of(fixed_cat, medium_type1=1)
    assert acquisition_cost(modular, modular_cat) == pytest.approx(acquisition_cost(fixed, fixed_cat))


def test_unknown_type(fixed_cat):
    with pytest.raises(InvalidArgumentError):
        FleetMix.of(fixed_cat, medium_motive=1)
    with pytest.raises(InvalidArgumentError):
        acquisition_cost(FleetMix(vehicle_counts={"tank": 1}), fixed_cat)


def test_diversity(fixed_cat, modular_cat):
    assert diversity(FleetMix.of(fixed_cat, medium_type1=2, medium_type2=2, heavy_type1=2, heavy_type2=2)) == 0.0
    assert diversity(FleetMix.of(fixed_cat, medium_type1=4)) == pytest.approx(3.0)
    assert diversity(FleetMix.of(modular_cat, medium_motive=2, module_type1=5)) == pytest.approx(1.0)


def test_lane_meters(fixed_cat, modular_cat):
    assert lane_meters(FleetMix.empty(fixed_cat), fixed_cat) == 0.0
    assert lane_meters(FleetMix.of(fixed_cat, medium_type1=2, medium_type2=1), fixed_cat) == 27.0
    bare = FleetMix.of(modular_cat, heavy_motive=1)
    loaded = FleetMix.of(modular_cat, heavy_motive=1, module_type1=4, module_type2=2)
    assert lane_meters(bare, modular_cat) == lane_meters(loaded, modular_cat) == 12.0


def test_objectives_grow_with_counts(fixed_cat, modular_cat):
    rng = np.random.default_rng(17)
    for cat in (fixed_cat, modular_cat):
        ids = [v.id for v in cat.vehicle_types] + [m.id for m in cat.module_types]
        for _ in range(50):
            mix = FleetMix.of(cat, **{i: int(rng.integers(0, 4)) for i in ids})
            grown = mix.with_added(vehicle_id=ids[int(rng.integers(len(cat.vehicle_types)))])
            assert acquisition_cost(grown, cat) >= acquisition_cost(mix, cat)
            assert lane_meters(grown, cat) >= lane_meters(mix, cat)
            counts = list(mix.vehicle_counts.values())
            assert (diversity(mix) == 0.0) == (len(set(counts)) == 1)


def test_fixed_mix_rejects_modules(fixed_cat):
    mix = FleetMix(vehicle_counts={"medium_type1": 1}, module_counts={"module_type1": 1})
    with pytest.raises(InvalidArgumentError):
        mix.check_against(fixed_cat)


def test_can_serve(fixed_cat, modular_cat):
    heavy_type1 = make_task(0, 0, 1, size=TaskSize.HEAVY)
    medium_type2 = make_task(1, 0, 1, task_type=TaskType.TYPE2)

    assert can_serve(fixed_cat.vehicle_type("heavy_type1"), None, heavy_type1)
    assert not can_serve(fixed_cat.vehicle_type("medium_type1"), None, heavy_type1)
    assert not can_serve(fixed_cat.vehicle_type("heavy_type1"), None, medium_type2)
    assert can_serve(fixed_cat.vehicle_type("heavy_type2"), None, medium_type2)

    motive = modular_cat.vehicle_type("medium_motive")
    assert can_serve(motive, modular_cat.module_type("module_type2"), medium_type2)
    assert not can_serve(motive, modular_cat.module_type("module_type1"), medium_type2)
    with pytest.raises(InvalidArgumentError):
        can_serve(motive, None, medium_type2)


def test_bundle_capacity(fixed_cat):
    heavy = fixed_cat.vehicle_type("heavy_type1")
    medium = fixed_cat.vehicle_type("medium_type1")
    two_medium = [make_task(0, 0, 1), make_task(1, 0, 1)]
    one_heavy = [make_task(2, 0, 1, size=TaskSize.HEAVY)]

    assert bundle_capacity(heavy) == 2 and bundle_capacity(medium) == 1
    assert fits(heavy, two_medium)
    assert fits(heavy, one_heavy)
    assert not fits(heavy, one_heavy + two_medium[:1])
    assert not fits(medium, two_medium)


class TestCatalogShape:
    def test_fixed_catalog_needs_every_size_and_type(self, fixed_cat):
        with pytest.raises(InvalidArgumentError):
            FleetCatalog(mode=FleetMode.FIXED, vehicle_types=fixed_cat.vehicle_types[:3])
        twin = replace(fixed_cat.vehicle_types[0], id="medium_type1_b")
        with pytest.raises(InvalidArgumentError):
            FleetCatalog(mode=FleetMode.FIXED, vehicle_types=fixed_cat.vehicle_types + (twin,))

    def test_modular_catalog_needs_one_module_per_task_type(self, modular_cat):
        with pytest.raises(InvalidArgumentError):
            FleetCatalog(mode=FleetMode.MODULAR, vehicle_types=modular_cat.vehicle_types, module_types=modular_cat.module_types[:1])
        with pytest.raises(InvalidArgumentError):
            FleetCatalog(mode=FleetMode.MODULAR, vehicle_types=modular_cat.vehicle_types[:1], module_types=modular_cat.module_types)

    def test_module_types_share_one_price(self, modular_cat):
        pricey = replace(modular_cat.module_types[1], cost=0.5)
        with pytest.raises(InvalidArgumentError):
            FleetCatalog(
                mode=FleetMode.MODULAR,
                vehicle_types=modular_cat.vehicle_types,
                module_types=(modular_cat.module_types[0], pricey),
            )

    def test_cost_parity(self, fixed_cat, modular_cat):
        check_cost_parity(fixed_cat, modular_cat)
        cheap = fixed_catalog(CatalogCosts(medium_fixed=0.9, medium_motive=0.85))
        with pytest.raises(InvalidArgumentError):
            check_cost_parity(cheap, modular_cat)
        with pytest.raises(InvalidArgumentError):
            check_cost_parity(modular_cat, fixed_cat)
