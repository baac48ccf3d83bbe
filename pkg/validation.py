"""Independent feasibility checks for solutions.

Nothing here relies on the tree editing code: coordinates are recomputed
with a separate traversal so the validator can serve as an oracle for it.
"""
import logging
from collections import Counter
from typing import List, NamedTuple, Optional

from models import NodeKind, Orientation

logger = logging.getLogger(__name__)

BOUNDS = "bounds"
OVERLAP = "overlap"
ACCOUNTING = "accounting"
DIMENSIONS = "dimensions"
STRUCTURE = "structure"
QUANTITY = "quantity"


class Violation(NamedTuple):
    code: str
    pattern: Optional[int]
    message: str

    def __str__(self):
        where = f"pattern {self.pattern}" if self.pattern is not None else "solution"
        return f"[{self.code}] {where}: {self.message}"


class ValidationReport:
    def __init__(self, violations):
        self.violations: List[Violation] = list(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def codes(self):
        return {violation.code for violation in self.violations}

    def __repr__(self):
        return "ValidationReport(pass)" if self.ok else f"ValidationReport({len(self.violations)} violations)"


def _collect(node, x, y, rects, leftovers, problems, index):
    """Walk the tree, checking partition sizes and normal form, gathering rectangles"""
    if node.width <= 0 or node.height <= 0:
        problems.append(Violation(STRUCTURE, index, f"node {node.id} has zero or negative area"))
        return

    if node.kind is NodeKind.ITEM:
        if node.children:
            problems.append(Violation(STRUCTURE, index, f"item node {node.id} has children"))
        rects.append((x, y, node.width, node.height, node))
        return
    if node.kind is NodeKind.LEFTOVER:
        if node.children:
            problems.append(Violation(STRUCTURE, index, f"leftover node {node.id} has children"))
        leftovers.append((x, y, node.width, node.height))
        return

    children = node.children
    if node.orientation not in (Orientation.H, Orientation.V):
        problems.append(Violation(STRUCTURE, index, f"structure node {node.id} has no orientation"))
        return
    if len(children) < 2:
        problems.append(Violation(STRUCTURE, index, f"structure node {node.id} has {len(children)} child(ren)"))

    vertical = node.orientation is Orientation.V
    along = 0
    previous_leftover = False
    for child in children:
        if child.kind is NodeKind.STRUCTURE and child.orientation is node.orientation:
            problems.append(Violation(
                STRUCTURE, index,
                f"node {child.id} repeats orientation {node.orientation.value} of its parent {node.id}"))
        if child.kind is NodeKind.LEFTOVER:
            if previous_leftover:
                problems.append(Violation(STRUCTURE, index, f"adjacent leftover siblings under node {node.id}"))
            previous_leftover = True
        else:
            previous_leftover = False

        if vertical:
            if child.height != node.height:
                problems.append(Violation(
                    STRUCTURE, index,
                    f"child {child.id} height {child.height} != parent {node.id} height {node.height}"))
            _collect(child, x + along, y, rects, leftovers, problems, index)
            along += child.width
        else:
            if child.width != node.width:
                problems.append(Violation(
                    STRUCTURE, index,
                    f"child {child.id} width {child.width} != parent {node.id} width {node.width}"))
            _collect(child, x, y + along, rects, leftovers, problems, index)
            along += child.height

    expected = node.width if vertical else node.height
    if along != expected:
        side = "widths" if vertical else "heights"
        problems.append(Violation(
            STRUCTURE, index, f"children {side} of node {node.id} sum to {along}, expected {expected}"))


def _overlaps(rects):
    """Pairs of overlapping rectangles, found with a sweep over x"""
    events = sorted(range(len(rects)), key=lambda k: rects[k][0])
    active = []
    clashes = []
    for k in events:
        x, y, w, h = rects[k][:4]
        active = [j for j in active if rects[j][0] + rects[j][2] > x]
        for j in active:
            oy, oh = rects[j][1], rects[j][3]
            if y < oy + oh and oy < y + h:
                clashes.append((j, k))
        active.append(k)
    return clashes


def validate(instance, solution):
    problems = []
    copies = instance.copies
    bins = {spec.id: spec for spec in instance.bins}
    seen = Counter()

    for index, pattern in enumerate(solution.patterns):
        spec = bins.get(pattern.bin.id)
        if spec is None:
            problems.append(Violation(QUANTITY, index, f"unknown bin type {pattern.bin.id}"))
            continue
        root = pattern.root
        if (root.width, root.height) != (spec.width, spec.height):
            problems.append(Violation(
                BOUNDS, index,
                f"root is {root.width}x{root.height} but bin {spec.id} is {spec.width}x{spec.height}"))

        rects, leftovers = [], []
        _collect(root, 0, 0, rects, leftovers, problems, index)

        for x, y, w, h, node in rects:
            if x < 0 or y < 0 or x + w > spec.width or y + h > spec.height:
                problems.append(Violation(BOUNDS, index, f"item node {node.id} at ({x},{y}) {w}x{h} leaves the bin"))
            seen[node.copy_id] += 1
            if node.copy_id is None or not 0 <= node.copy_id < len(copies):
                problems.append(Violation(ACCOUNTING, index, f"item node {node.id} has unknown copy {node.copy_id}"))
                continue
            copy = copies[node.copy_id]
            if node.item_id != copy.item_id:
                problems.append(Violation(
                    ACCOUNTING, index, f"copy {copy.copy_id} labelled item {node.item_id}, expected {copy.item_id}"))
            expected = (copy.height, copy.width) if node.rotated else (copy.width, copy.height)
            if (w, h) != expected:
                problems.append(Violation(
                    DIMENSIONS, index, f"copy {copy.copy_id} placed as {w}x{h}, expected {expected[0]}x{expected[1]}"))
            if node.rotated and not instance.rotation_allowed:
                problems.append(Violation(DIMENSIONS, index, f"copy {copy.copy_id} rotated but rotation is not allowed"))

        for j, k in _overlaps([r[:4] for r in rects] + leftovers):
            problems.append(Violation(OVERLAP, index, f"rectangles {j} and {k} overlap"))

        covered = sum(w * h for _, _, w, h, _ in rects) + sum(w * h for _, _, w, h in leftovers)
        if covered != spec.area:
            problems.append(Violation(STRUCTURE, index, f"pieces cover {covered} of bin area {spec.area}"))

    for copy_id in solution.excluded:
        seen[copy_id] += 1
        if not 0 <= copy_id < len(copies):
            problems.append(Violation(ACCOUNTING, None, f"excluded list holds unknown copy {copy_id}"))

    for copy in copies:
        count = seen.get(copy.copy_id, 0)
        if count != 1:
            problems.append(Violation(
                ACCOUNTING, None, f"copy {copy.copy_id} of item {copy.item_id} accounted {count} times"))

    usage = Counter(pattern.bin.id for pattern in solution.patterns)
    for bin_id, used in usage.items():
        spec = bins.get(bin_id)
        if spec is not None and spec.quantity is not None and used > spec.quantity:
            problems.append(Violation(QUANTITY, None, f"bin type {bin_id} used {used} times, limit {spec.quantity}"))

    if problems:
        logger.debug(f"Validation found {len(problems)} violation(s)")
    return ValidationReport(problems)
