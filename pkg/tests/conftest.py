import os
import random

import pytest

from models import BinSpec, CuttingPattern, Instance, ItemSpec, Solution
from recreate import RecreateParams, recreate

INSTANCE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "instances")


def instance_path(name):
    return os.path.join(INSTANCE_DIR, name)


def make_instance(bins, items, rotation_allowed=False, name="test"):
    """bins: (w, h) or (w, h, quantity); items: (w, h) or (w, h, demand)"""
    return Instance(
        name=name,
        rotation_allowed=rotation_allowed,
        bins=[BinSpec(id=k, width=b[0], height=b[1], quantity=b[2] if len(b) > 2 else None)
              for k, b in enumerate(bins)],
        items=[ItemSpec(id=k, width=i[0], height=i[1], demand=i[2] if len(i) > 2 else 1)
               for k, i in enumerate(items)],
    )


def random_instance(rng, max_copies=5, max_bin_types=2, max_side=8, rotation_allowed=None, name="random"):
    """Tiny instance whose every item fits the first bin type"""
    bins = []
    for _ in range(rng.randint(1, max_bin_types)):
        bins.append((rng.randint(3, max_side), rng.randint(3, max_side)))
    copies = rng.randint(1, max_copies)
    width, height = bins[0]
    items = []
    while copies > 0:
        demand = rng.randint(1, copies)
        items.append((rng.randint(1, width), rng.randint(1, height), demand))
        copies -= demand
    if rotation_allowed is None:
        rotation_allowed = rng.random() < 0.5
    return make_instance(bins, items, rotation_allowed=rotation_allowed, name=name)


def greedy_solution(instance, seed=0, a_lim=float("inf")):
    """Deterministic blink-free reconstruction of the empty solution"""
    solution = Solution.empty(instance)
    return recreate(solution, a_lim, RecreateParams(alpha=1.2, beta=0.0), random.Random(seed))


def empty_pattern(width, height, bin_id=0):
    return CuttingPattern.empty(BinSpec(id=bin_id, width=width, height=height))


def build_pattern(width, height, root, bin_id=0):
    """Pattern around a hand-built tree; fresh node ids continue after the largest one used"""
    return CuttingPattern(BinSpec(id=bin_id, width=width, height=height), root)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def tile_instance():
    return make_instance([(10, 10)], [(5, 5, 4)], name="tile")


@pytest.fixture
def strips_instance():
    return make_instance([(8, 6)], [(4, 3, 3), (8, 2, 1), (2, 2, 2)], name="strips")


@pytest.fixture
def variable_instance():
    return make_instance([(10, 10), (6, 6)], [(6, 6, 1), (4, 4, 1)], name="variable")
