import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from errors import PackingError


class NodeKind(enum.Enum):
    STRUCTURE = "structure"
    ITEM = "item"
    LEFTOVER = "leftover"


class Orientation(enum.Enum):
    # V: children laid out left to right (vertical cuts), H: top to bottom
    H = "H"
    V = "V"


class ItemSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    demand: int = Field(default=1, ge=1)

    @property
    def area(self):
        return self.width * self.height


class BinSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    # None means unlimited
    quantity: Optional[int] = Field(default=None, ge=1)

    @property
    def area(self):
        return self.width * self.height

    def can_hold(self, width, height):
        return width <= self.width and height <= self.height


@dataclass(frozen=True, slots=True)
class ItemCopy:
    """One demanded, independently placeable copy of an item type"""
    copy_id: int
    item_id: int
    width: int
    height: int

    @property
    def area(self):
        return self.width * self.height

    def orientations(self, rotation_allowed):
        """Distinct (width, height, rotated) placements of this copy"""
        if rotation_allowed and self.width != self.height:
            return ((self.width, self.height, False), (self.height, self.width, True))
        return ((self.width, self.height, False),)


class Instance(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = "instance"
    items: List[ItemSpec] = Field(min_length=1)
    bins: List[BinSpec] = Field(min_length=1)
    rotation_allowed: bool = False
    # Stored and reported only; never enforced
    max_stages: Optional[int] = Field(default=None, ge=1)

    _copies: List[ItemCopy] = PrivateAttr(default_factory=list)
    _bins_by_id: dict = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_consistency(self):
        item_ids = [item.id for item in self.items]
        if len(set(item_ids)) != len(item_ids):
            raise ValueError("item ids must be unique")
        bin_ids = [spec.id for spec in self.bins]
        if len(set(bin_ids)) != len(bin_ids):
            raise ValueError("bin ids must be unique")

        for item in self.items:
            fits = any(
                spec.can_hold(item.width, item.height)
                or (self.rotation_allowed and spec.can_hold(item.height, item.width))
                for spec in self.bins
            )
            if not fits:
                raise ValueError(f"item {item.id} ({item.width}x{item.height}) fits in no bin type")
        return self

    def model_post_init(self, __context):
        copies = []
        for item in self.items:
            for _ in range(item.demand):
                copies.append(ItemCopy(len(copies), item.id, item.width, item.height))
        self._copies = copies
        self._bins_by_id = {spec.id: spec for spec in self.bins}

    @property
    def copies(self):
        return self._copies

    def copy_by_id(self, copy_id):
        return self._copies[copy_id]

    def bin_by_id(self, bin_id):
        try:
            return self._bins_by_id[bin_id]
        except KeyError:
            raise PackingError(f"Unknown bin type {bin_id}")

    @property
    def total_item_area(self):
        return sum(copy.area for copy in self._copies)

    def scaled(self, factor):
        """Same instance with every dimension multiplied by factor"""
        return Instance(
            name=f"{self.name}-x{factor}",
            items=[item.model_copy(update={"width": item.width * factor, "height": item.height * factor})
                   for item in self.items],
            bins=[spec.model_copy(update={"width": spec.width * factor, "height": spec.height * factor})
                  for spec in self.bins],
            rotation_allowed=self.rotation_allowed,
            max_stages=self.max_stages,
        )


class Node:
    """Node of a cutting pattern tree.

    Structure nodes partition their rectangle among ordered children: a V node
    places them left to right (all share its height), an H node top to bottom
    (all share its width). Leaves are item or leftover nodes.
    """

    __slots__ = ("id", "kind", "width", "height", "orientation", "children",
                 "copy_id", "item_id", "rotated", "parent")

    def __init__(self, node_id, kind, width, height, orientation=None, children=None,
                 copy_id=None, item_id=None, rotated=False):
        self.id = node_id
        self.kind = kind
        self.width = width
        self.height = height
        self.orientation = orientation
        self.children = children if children is not None else []
        self.copy_id = copy_id
        self.item_id = item_id
        self.rotated = rotated
        self.parent = None
        for child in self.children:
            child.parent = self

    @classmethod
    def leftover(cls, node_id, width, height):
        return cls(node_id, NodeKind.LEFTOVER, width, height)

    @classmethod
    def item(cls, node_id, copy, rotated=False):
        width, height = (copy.height, copy.width) if rotated else (copy.width, copy.height)
        return cls(node_id, NodeKind.ITEM, width, height,
                   copy_id=copy.copy_id, item_id=copy.item_id, rotated=rotated)

    @classmethod
    def structure(cls, node_id, orientation, children):
        if orientation is Orientation.V:
            width = sum(child.width for child in children)
            height = children[0].height
        else:
            width = children[0].width
            height = sum(child.height for child in children)
        return cls(node_id, NodeKind.STRUCTURE, width, height, orientation=orientation, children=children)

    @property
    def area(self):
        return self.width * self.height

    @property
    def is_structure(self):
        return self.kind is NodeKind.STRUCTURE

    @property
    def is_leftover(self):
        return self.kind is NodeKind.LEFTOVER

    @property
    def is_item(self):
        return self.kind is NodeKind.ITEM

    def walk(self):
        """Pre-order traversal, parents before children, children in layout order"""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.children:
                stack.extend(reversed(node.children))

    def clone(self):
        twin = Node(self.id, self.kind, self.width, self.height, self.orientation,
                    [child.clone() for child in self.children],
                    self.copy_id, self.item_id, self.rotated)
        return twin

    def __repr__(self):
        if self.kind is NodeKind.STRUCTURE:
            return f"{self.orientation.value}#{self.id}({self.width}x{self.height})[{', '.join(map(repr, self.children))}]"
        if self.kind is NodeKind.ITEM:
            rot = "r" if self.rotated else ""
            return f"I{self.item_id}.{self.copy_id}{rot}({self.width}x{self.height})"
        return f"L#{self.id}({self.width}x{self.height})"


class CuttingPattern:
    """One opened bin and the tree describing how it is cut"""

    __slots__ = ("bin", "root", "_next_id")

    def __init__(self, bin_spec, root, next_id=None):
        self.bin = bin_spec
        self.root = root
        root.parent = None
        if next_id is None:
            next_id = max(node.id for node in root.walk()) + 1
        self._next_id = next_id

    @classmethod
    def empty(cls, bin_spec):
        return cls(bin_spec, Node.leftover(0, bin_spec.width, bin_spec.height), next_id=1)

    def new_id(self):
        node_id = self._next_id
        self._next_id += 1
        return node_id

    @property
    def area(self):
        return self.bin.area

    @property
    def is_empty(self):
        return self.root.kind is NodeKind.LEFTOVER

    def nodes(self):
        return self.root.walk()

    def leftovers(self):
        return [node for node in self.root.walk() if node.kind is NodeKind.LEFTOVER]

    def item_nodes(self):
        return [node for node in self.root.walk() if node.kind is NodeKind.ITEM]

    def removable_nodes(self):
        """Item and structure nodes in pre-order (root first)"""
        return [node for node in self.root.walk() if node.kind is not NodeKind.LEFTOVER]

    def find(self, node_id):
        for node in self.root.walk():
            if node.id == node_id:
                return node
        return None

    def contains(self, node):
        while node.parent is not None:
            node = node.parent
        return node is self.root

    def stages(self):
        """Number of structure levels, i.e. blade rotations needed to cut the pattern"""
        def depth(node):
            if node.kind is not NodeKind.STRUCTURE:
                return 0
            return 1 + max(depth(child) for child in node.children)
        return depth(self.root)

    def copy(self):
        return CuttingPattern(self.bin, self.root.clone(), self._next_id)

    def __repr__(self):
        return f"CuttingPattern(bin={self.bin.id}, {self.root!r})"


class Solution:
    """A set of cutting patterns C plus the excluded item copies E"""

    __slots__ = ("instance", "patterns", "excluded")

    def __init__(self, instance, patterns=None, excluded=None):
        self.instance = instance
        self.patterns = patterns if patterns is not None else []
        self.excluded = excluded if excluded is not None else []

    @classmethod
    def empty(cls, instance):
        """No patterns, every copy excluded"""
        return cls(instance, [], [copy.copy_id for copy in instance.copies])

    def copy(self):
        return Solution(self.instance, [pattern.copy() for pattern in self.patterns], list(self.excluded))

    @property
    def total_bin_area(self):
        return sum(pattern.bin.area for pattern in self.patterns)

    @property
    def is_feasible(self):
        return not self.excluded

    def bin_usage(self):
        return Counter(pattern.bin.id for pattern in self.patterns)


class Placement(NamedTuple):
    item_id: int
    rotated: bool
    x: int
    y: int
    width: int
    height: int
    copy_id: int


class Region(NamedTuple):
    x: int
    y: int
    width: int
    height: int


def excluded_area(solution):
    copies = solution.instance.copies
    return sum(copies[copy_id].area for copy_id in solution.excluded)


def leftover_value(solution, alpha):
    total = 0
    for pattern in solution.patterns:
        for node in pattern.root.walk():
            if node.kind is NodeKind.LEFTOVER:
                total += (node.width * node.height) ** alpha
    return total


def utilization(solution):
    bin_area = solution.total_bin_area
    if bin_area == 0:
        raise PackingError("Utilization is undefined for a solution without cutting patterns")
    placed = sum(node.area for pattern in solution.patterns for node in pattern.item_nodes())
    return 100.0 * placed / bin_area


def _realize(node, x, y) -> Iterator:
    yield node, x, y
    if node.kind is NodeKind.STRUCTURE:
        offset = 0
        for child in node.children:
            if node.orientation is Orientation.V:
                yield from _realize(child, x + offset, y)
                offset += child.width
            else:
                yield from _realize(child, x, y + offset)
                offset += child.height


def layout(pattern):
    """Absolute rectangles of every item in the pattern; origin top-left, y grows downward"""
    return [
        Placement(node.item_id, node.rotated, x, y, node.width, node.height, node.copy_id)
        for node, x, y in _realize(pattern.root, 0, 0)
        if node.kind is NodeKind.ITEM
    ]


def leftover_layout(pattern):
    return [
        Region(x, y, node.width, node.height)
        for node, x, y in _realize(pattern.root, 0, 0)
        if node.kind is NodeKind.LEFTOVER
    ]
