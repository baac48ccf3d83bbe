import math
import random

import pytest

from conftest import make_instance, random_instance
from errors import OracleBudgetError
from models import Solution
from oracle import OracleBudget, bin_multisets, exact_min_area, is_guillotine, placement_min_area
from search import SearchParams, gdrr
from validation import validate


@pytest.mark.parametrize("bins, items, rotation, optimum", [
    ([(10, 10)], [(5, 5, 4)], False, 100),
    ([(10, 10), (6, 6)], [(6, 6, 1), (4, 4, 1)], False, 72),
    ([(8, 6)], [(4, 3, 3), (8, 2, 1), (2, 2, 2)], False, 96),
    ([(4, 10, 2)], [(10, 2, 2)], True, 40),
    ([(10, 4)], [(4, 10, 1), (10, 4, 1)], True, 80),
])
def test_known_optima(bins, items, rotation, optimum):
    instance = make_instance(bins, items, rotation_allowed=rotation)
    result = exact_min_area(instance)
    assert result.area == optimum
    assert result.solution.total_bin_area == optimum
    assert validate(instance, result.solution).ok
    assert result.solution.is_feasible


def test_bin_multisets_respect_quantity_and_area_order():
    instance = make_instance([(4, 4, 1), (5, 5)], [(2, 2, 3)])
    multisets = bin_multisets(instance)
    areas = [area for area, _ in multisets]
    assert areas == sorted(areas)
    assert all([spec.id for spec in combo].count(0) <= 1 for _, combo in multisets)
    assert areas[0] == 16


def test_budget_limits():
    instance = make_instance([(10, 10)], [(5, 5, 4)])
    with pytest.raises(OracleBudgetError):
        exact_min_area(instance, OracleBudget(max_copies=3))
    with pytest.raises(OracleBudgetError):
        exact_min_area(make_instance([(10, 10)], [(3, 4, 5), (2, 2)]), OracleBudget(node_budget=1))


def test_guillotine_check():
    side_by_side = [(0, 0, 2, 3), (2, 0, 1, 3)]
    assert is_guillotine(side_by_side)
    pinwheel = [(0, 0, 2, 1), (2, 0, 1, 2), (1, 2, 2, 1), (0, 1, 1, 2), (1, 1, 1, 1)]
    assert not is_guillotine(pinwheel)


@pytest.mark.parametrize("seed", range(25))
def test_tree_and_placement_enumerators_agree(seed):
    instance = random_instance(random.Random(seed), max_copies=4, max_bin_types=2, max_side=6)
    assert exact_min_area(instance).area == placement_min_area(instance)


@pytest.mark.parametrize("seed", range(10))
def test_oracle_bounds_the_heuristic(seed):
    instance = random_instance(random.Random(100 + seed), max_copies=5, max_bin_types=2)
    optimum = exact_min_area(instance).area
    params = SearchParams(time_limit=10, history_length=50, mu=2, seed=seed, max_iterations=150)
    best = gdrr(Solution.empty(instance), math.inf, params, rng=random.Random(seed))
    assert best.total_bin_area >= optimum


@pytest.mark.slow
def test_heuristic_reaches_optimum_on_tiny_instances():
    hits = 0
    for seed in range(50):
        instance = random_instance(random.Random(1000 + seed), max_copies=5, max_bin_types=2)
        optimum = exact_min_area(instance).area
        params = SearchParams.for_instance(instance, time_limit=5.0, seed=seed)
        best = gdrr(Solution.empty(instance), math.inf, params, rng=random.Random(seed))
        assert best.total_bin_area >= optimum
        hits += best.total_bin_area == optimum
    assert hits >= 48
