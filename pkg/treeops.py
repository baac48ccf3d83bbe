"""Structural edits on cutting pattern trees.

Every edit leaves the tree in normal form:
  * no zero-area nodes,
  * adjacent leftover siblings merged into one,
  * no structure node with a single child,
  * no structure child sharing its parent's orientation (spliced into the parent).
Surviving leaves keep their node ids.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

from errors import InvalidNodeError, StaleOptionError
from models import CuttingPattern, Node, NodeKind, Orientation


@dataclass(slots=True)
class InsertionOption:
    pattern: CuttingPattern
    target: Node
    rotated: bool
    first_cut: Orientation
    item_width: int
    item_height: int
    created_leftovers: Tuple[Tuple[int, int], ...]
    cost: float

    @property
    def bin_id(self):
        return self.pattern.bin.id


def created_leftovers(width, height, item_width, item_height, first_cut):
    """Leftover rectangles produced when an item is cut out of a width x height leftover.

    The first cut separates the item's strip from the rest; the second, perpendicular
    cut isolates the item inside that strip. Zero-area pieces are omitted.
    """
    if first_cut is Orientation.V:
        pieces = ((width - item_width, height), (item_width, height - item_height))
    else:
        pieces = ((width, height - item_height), (width - item_width, item_height))
    return tuple((w, h) for w, h in pieces if w > 0 and h > 0)


def option_cost(option, alpha):
    used = (option.target.width * option.target.height) ** alpha
    return used - sum((w * h) ** alpha for w, h in option.created_leftovers)


def first_cuts(width, height, item_width, item_height):
    """First-cut directions yielding distinct trees once normalized"""
    if item_width == width and item_height == height:
        return (Orientation.V,)
    if item_width == width:
        return (Orientation.H,)
    if item_height == height:
        return (Orientation.V,)
    return (Orientation.V, Orientation.H)


def enumerate_options(copy, rotation_allowed, solution, alpha, patterns=None) -> List[InsertionOption]:
    """All distinct ways of inserting copy into a leftover of the given patterns (default: all of them)"""
    orientations = copy.orientations(rotation_allowed)
    options = []
    for pattern in (solution.patterns if patterns is None else patterns):
        for node in pattern.root.walk():
            if node.kind is not NodeKind.LEFTOVER:
                continue
            width, height = node.width, node.height
            used_value = (width * height) ** alpha
            for item_width, item_height, rotated in orientations:
                if item_width > width or item_height > height:
                    continue
                for cut in first_cuts(width, height, item_width, item_height):
                    created = created_leftovers(width, height, item_width, item_height, cut)
                    cost = used_value - sum((w * h) ** alpha for w, h in created)
                    options.append(InsertionOption(pattern, node, rotated, cut, item_width, item_height, created, cost))
    return options


def count_options(width, height, rotation_allowed, leftover_counts):
    """Number of options enumerate_options would emit for an item of this size.

    leftover_counts maps (width, height) of leftovers to their multiplicity.
    """
    if rotation_allowed and width != height:
        orientations = ((width, height), (height, width))
    else:
        orientations = ((width, height),)
    total = 0
    for (lw, lh), multiplicity in leftover_counts.items():
        for iw, ih in orientations:
            if iw <= lw and ih <= lh:
                total += multiplicity if (iw == lw or ih == lh) else 2 * multiplicity
    return total


def _piece(pattern, width, height, item_node, cut):
    """Item node plus filler leftover for the item's strip (width x height), split along cut"""
    if cut is Orientation.H:
        if item_node.height == height:
            return item_node
        rest = Node.leftover(pattern.new_id(), width, height - item_node.height)
        return Node.structure(pattern.new_id(), Orientation.H, [item_node, rest])
    if item_node.width == width:
        return item_node
    rest = Node.leftover(pattern.new_id(), width - item_node.width, height)
    return Node.structure(pattern.new_id(), Orientation.V, [item_node, rest])


def build_subtree(pattern, width, height, item_node, first_cut):
    """Tree replacing a width x height leftover once item_node is cut out of it"""
    if first_cut is Orientation.V:
        strip = _piece(pattern, item_node.width, height, item_node, Orientation.H)
        if item_node.width == width:
            return strip
        rest = Node.leftover(pattern.new_id(), width - item_node.width, height)
        return Node.structure(pattern.new_id(), Orientation.V, [strip, rest])
    strip = _piece(pattern, width, item_node.height, item_node, Orientation.V)
    if item_node.height == height:
        return strip
    rest = Node.leftover(pattern.new_id(), width, height - item_node.height)
    return Node.structure(pattern.new_id(), Orientation.H, [strip, rest])


def _replace(pattern, old, new):
    parent = old.parent
    if parent is None:
        pattern.root = new
        new.parent = None
    else:
        index = next(k for k, child in enumerate(parent.children) if child is old)
        parent.children[index] = new
        new.parent = parent
    old.parent = None


def _canonicalize_children(node):
    vertical = node.orientation is Orientation.V
    merged = []
    for child in node.children:
        if child.kind is NodeKind.STRUCTURE and child.orientation is node.orientation:
            pending = child.children
        else:
            pending = (child,)
        for piece in pending:
            if piece.width <= 0 or piece.height <= 0:
                continue
            if piece.kind is NodeKind.LEFTOVER and merged and merged[-1].kind is NodeKind.LEFTOVER:
                if vertical:
                    merged[-1].width += piece.width
                else:
                    merged[-1].height += piece.height
                piece.parent = None
                continue
            piece.parent = node
            merged.append(piece)
    node.children = merged


def _settle(pattern, node):
    """Restore normal form at node and, as far as collapses propagate, at its ancestors"""
    while node is not None:
        _canonicalize_children(node)
        if len(node.children) != 1:
            return
        only = node.children[0]
        parent = node.parent
        _replace(pattern, node, only)
        node = parent


def normalize(pattern):
    """Bring a whole (possibly hand-built) tree into normal form"""
    def visit(node):
        if node.kind is not NodeKind.STRUCTURE:
            return
        for child in list(node.children):
            visit(child)
        _canonicalize_children(node)
        if len(node.children) == 1:
            _replace(pattern, node, node.children[0])

    visit(pattern.root)
    # collapsing a child can hand the parent a same-orientation structure or a new leftover
    if pattern.root.kind is NodeKind.STRUCTURE:
        _settle(pattern, pattern.root)
    return pattern


def released_copies(node):
    return [n.copy_id for n in node.walk() if n.kind is NodeKind.ITEM]


def remove_node(pattern, node) -> Tuple[Optional[CuttingPattern], List[int]]:
    """Replace node by a leftover of the same size, in place.

    Returns the pattern (None once nothing but leftover space remains) and the
    copy ids of every item in the removed subtree.
    """
    if node.kind is NodeKind.LEFTOVER:
        raise InvalidNodeError(f"Leftover node {node.id} cannot be removed")
    if not pattern.contains(node):
        raise InvalidNodeError(f"Node {node.id} does not belong to pattern of bin {pattern.bin.id}")

    released = released_copies(node)
    if node is pattern.root:
        return None, released

    parent = node.parent
    _replace(pattern, node, Node.leftover(pattern.new_id(), node.width, node.height))
    _settle(pattern, parent)
    if pattern.root.kind is NodeKind.LEFTOVER:
        return None, released
    return pattern, released


def insert(solution, option, copy):
    """Apply an insertion option enumerated against this very solution (in place)"""
    pattern, target = option.pattern, option.target
    if (target.kind is not NodeKind.LEFTOVER
            or not any(p is pattern for p in solution.patterns)
            or not pattern.contains(target)
            or option.item_width > target.width
            or option.item_height > target.height):
        raise StaleOptionError(f"Option targeting node {target.id} of bin {pattern.bin.id} is stale")

    item_node = Node.item(pattern.new_id(), copy, option.rotated)
    subtree = build_subtree(pattern, target.width, target.height, item_node, option.first_cut)
    parent = target.parent
    _replace(pattern, target, subtree)
    if parent is not None:
        _settle(pattern, parent)
    solution.excluded.remove(copy.copy_id)
    return solution


def canonical_form(node):
    """Hashable structural description of a subtree (ignores node ids)"""
    if node.kind is NodeKind.ITEM:
        return ("I", node.copy_id, node.rotated, node.width, node.height)
    if node.kind is NodeKind.LEFTOVER:
        return ("L", node.width, node.height)
    return (node.orientation.value, node.width, node.height, tuple(canonical_form(c) for c in node.children))
