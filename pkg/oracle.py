"""Exact minimum total bin area for tiny instances.

Two independent enumerators:
  * tree space (primary): recursive guillotine partitions of each bin, memoized
    on (item sizes, rectangle), with minimal cut positions taken from sums of
    item sides;
  * placement space: corner-point placements in every order, then an explicit
    recursive guillotine check of the resulting layout.
Both explore bin multisets in non-decreasing total area and stop at the first
multiset whose bins can hold every copy.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional

from pydantic import BaseModel, Field

from errors import OracleBudgetError
from models import CuttingPattern, Node, Orientation, Solution
from treeops import build_subtree, normalize

logger = logging.getLogger(__name__)


class OracleBudget(BaseModel):
    max_copies: int = Field(default=6, ge=1)
    max_bin_types: int = Field(default=3, ge=1)
    node_budget: int = Field(default=2_000_000, ge=1)


@dataclass
class OracleResult:
    area: int
    solution: Optional[Solution]
    bins: List[int]


class _Counter:
    def __init__(self, budget):
        self.limit = budget
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise OracleBudgetError(f"Oracle node budget of {self.limit} exhausted")


def _check_budget(instance, budget):
    if len(instance.copies) > budget.max_copies:
        raise OracleBudgetError(f"{len(instance.copies)} item copies exceed the oracle limit of {budget.max_copies}")
    if len(instance.bins) > budget.max_bin_types:
        raise OracleBudgetError(f"{len(instance.bins)} bin types exceed the oracle limit of {budget.max_bin_types}")


def bin_multisets(instance):
    """Multisets of bin types (at most one bin per copy), by non-decreasing total area"""
    copies = len(instance.copies)
    needed = instance.total_item_area
    found = []
    for size in range(1, copies + 1):
        for combo in itertools.combinations_with_replacement(instance.bins, size):
            counts = {}
            for spec in combo:
                counts[spec.id] = counts.get(spec.id, 0) + 1
            if any(spec.quantity is not None and counts[spec.id] > spec.quantity for spec in combo):
                continue
            area = sum(spec.area for spec in combo)
            if area >= needed:
                found.append((area, size, [spec.id for spec in combo], list(combo)))
    found.sort(key=lambda entry: (entry[0], entry[1], entry[2]))
    return [(area, combo) for area, _, _, combo in found]


def _orientations(size, rotation_allowed):
    w, h = size
    if rotation_allowed and w != h:
        return ((w, h, False), (h, w, True))
    return ((w, h, False),)


def _assignments(sizes, bins, rotation_allowed, packs):
    """First assignment of item sizes to bins (every bin used) for which packs(group, bin) succeeds"""
    k = len(bins)
    groups = [[] for _ in range(k)]
    areas = [0] * k

    def place(index):
        if index == len(sizes):
            if any(not group for group in groups):
                return None
            plans = []
            for group, spec in zip(groups, bins):
                plan = packs(tuple(sorted(group)), spec.width, spec.height)
                if plan is None:
                    return None
                plans.append(plan)
            return plans
        size = sizes[index]
        area = size[0] * size[1]
        tried = set()
        for b, spec in enumerate(bins):
            # identical empty bins are interchangeable
            signature = (spec.id, tuple(groups[b]))
            if signature in tried:
                continue
            tried.add(signature)
            if areas[b] + area > spec.area:
                continue
            if not any(w <= spec.width and h <= spec.height for w, h, _ in _orientations(size, rotation_allowed)):
                continue
            groups[b].append(size)
            areas[b] += area
            result = place(index + 1)
            groups[b].pop()
            areas[b] -= area
            if result is not None:
                return result
        return None

    return place(0)


class TreeOracle:
    """Tree-space exhaustive search"""

    def __init__(self, instance, budget=None):
        self.logger = logging.getLogger(__name__)
        self.instance = instance
        self.budget = budget or OracleBudget()
        self.rotation_allowed = instance.rotation_allowed
        self._memo = {}
        self._counter = _Counter(self.budget.node_budget)

    def _side_sums(self, sizes, horizontal):
        sums = {0}
        for size in sizes:
            sides = {w if horizontal else h for w, h, _ in _orientations(size, self.rotation_allowed)}
            sums |= {s + side for s in sums for side in sides}
        return sums

    def pack(self, sizes, width, height):
        """Guillotine plan for the sorted tuple of item sizes inside width x height, or None"""
        key = (sizes, width, height)
        if key in self._memo:
            return self._memo[key]
        self._counter.tick()
        plan = self._search(sizes, width, height)
        self._memo[key] = plan
        return plan

    def _search(self, sizes, width, height):
        if len(sizes) == 1:
            for w, h, rotated in _orientations(sizes[0], self.rotation_allowed):
                if w <= width and h <= height:
                    return ("item", sizes[0], rotated)
            return None
        if sum(w * h for w, h in sizes) > width * height:
            return None

        n = len(sizes)
        seen = set()
        for mask in range(1, 2 ** n - 1):
            if not mask & 1:
                continue
            left = tuple(sorted(sizes[i] for i in range(n) if mask >> i & 1))
            if left in seen:
                continue
            seen.add(left)
            right = tuple(sorted(sizes[i] for i in range(n) if not mask >> i & 1))
            for orientation in (Orientation.V, Orientation.H):
                plan = self._split(left, right, width, height, orientation)
                if plan is not None:
                    return plan
                plan = self._split(right, left, width, height, orientation)
                if plan is not None:
                    return plan
        return None

    def _split(self, first, second, width, height, orientation):
        vertical = orientation is Orientation.V
        extent = width if vertical else height
        for cut in sorted(s for s in self._side_sums(first, vertical) if 0 < s < extent):
            first_plan = self.pack(first, cut, height) if vertical else self.pack(first, width, cut)
            if first_plan is None:
                continue
            # the smallest feasible cut leaves the most room for the other side
            second_plan = (self.pack(second, width - cut, height) if vertical
                           else self.pack(second, width, height - cut))
            if second_plan is None:
                return None
            return ("cut", orientation, cut, first_plan, second_plan)
        return None

    def _build(self, plan, width, height, pattern, pool):
        if plan[0] == "item":
            _, size, rotated = plan
            copy = pool[size].pop()
            item_node = Node.item(pattern.new_id(), copy, rotated)
            return build_subtree(pattern, width, height, item_node, Orientation.V)
        _, orientation, cut, first, second = plan
        if orientation is Orientation.V:
            children = [self._build(first, cut, height, pattern, pool),
                        self._build(second, width - cut, height, pattern, pool)]
        else:
            children = [self._build(first, width, cut, pattern, pool),
                        self._build(second, width, height - cut, pattern, pool)]
        return Node.structure(pattern.new_id(), orientation, children)

    def witness(self, bins, plans):
        pool = {}
        for copy in self.instance.copies:
            pool.setdefault((copy.width, copy.height), []).append(copy)
        for copies in pool.values():
            copies.reverse()
        patterns = []
        for spec, plan in zip(bins, plans):
            pattern = CuttingPattern.empty(spec)
            pattern.root = self._build(plan, spec.width, spec.height, pattern, pool)
            pattern.root.parent = None
            patterns.append(normalize(pattern))
        return Solution(self.instance, patterns, [])

    def solve(self):
        _check_budget(self.instance, self.budget)
        sizes = [(copy.width, copy.height) for copy in self.instance.copies]
        for area, bins in bin_multisets(self.instance):
            plans = _assignments(sizes, bins, self.rotation_allowed, self.pack)
            if plans is not None:
                self.logger.debug(f"Oracle optimum {area} for {self.instance.name} after {self._counter.used} nodes")
                return OracleResult(area, self.witness(bins, plans), [spec.id for spec in bins])
        # every copy fits some bin type, so with unlimited quantities a solution always exists
        raise OracleBudgetError(f"No bin multiset of {self.instance.name} can hold all items")


def exact_min_area(instance, budget=None):
    """Optimal total bin area and a witness solution"""
    return TreeOracle(instance, budget).solve()


def is_guillotine(rects):
    """Whether (x, y, w, h) rectangles can be separated by recursive edge-to-edge cuts"""
    if len(rects) <= 1:
        return True
    for axis in (0, 1):
        for line in sorted({r[axis] + r[axis + 2] for r in rects}):
            before = [r for r in rects if r[axis] + r[axis + 2] <= line]
            after = [r for r in rects if r[axis] >= line]
            if before and after and len(before) + len(after) == len(rects):
                return is_guillotine(before) and is_guillotine(after)
    return False


class PlacementOracle:
    """Placement-space exhaustive search with an explicit guillotine check"""

    def __init__(self, instance, budget=None):
        self.instance = instance
        self.budget = budget or OracleBudget()
        self.rotation_allowed = instance.rotation_allowed
        self._memo = {}
        self._counter = _Counter(self.budget.node_budget)

    def pack(self, sizes, width, height):
        key = (sizes, width, height)
        if key not in self._memo:
            self._memo[key] = self._place([], list(sizes), width, height)
        return self._memo[key]

    def _place(self, placed, remaining, width, height):
        if not remaining:
            return list(placed) if is_guillotine(placed) else None
        xs = {0} | {x + w for x, _, w, _ in placed}
        ys = {0} | {y + h for _, y, _, h in placed}
        tried = set()
        for index, size in enumerate(remaining):
            if size in tried:
                continue
            tried.add(size)
            rest = remaining[:index] + remaining[index + 1:]
            for w, h, _ in _orientations(size, self.rotation_allowed):
                for x in sorted(xs):
                    if x + w > width:
                        continue
                    for y in sorted(ys):
                        if y + h > height:
                            continue
                        self._counter.tick()
                        if any(x < px + pw and px < x + w and y < py + ph and py < y + h
                               for px, py, pw, ph in placed):
                            continue
                        placed.append((x, y, w, h))
                        result = self._place(placed, rest, width, height)
                        placed.pop()
                        if result is not None:
                            return result
        return None

    def solve(self):
        _check_budget(self.instance, self.budget)
        sizes = [(copy.width, copy.height) for copy in self.instance.copies]
        for area, bins in bin_multisets(self.instance):
            if _assignments(sizes, bins, self.rotation_allowed, self.pack) is not None:
                return area
        raise OracleBudgetError(f"No bin multiset of {self.instance.name} can hold all items")


def placement_min_area(instance, budget=None):
    return PlacementOracle(instance, budget).solve()
