"""Instance ingestion and solution documents.

Instance formats:
  * json: {"name", "rotation_allowed"?, "max_stages"?, "bins": [{"width", "height", "quantity"?}],
           "items": [{"width", "height", "demand"}]}
  * text: whitespace separated; bin-type count B, then B lines "W H Q" (Q = 0 means unlimited),
          item-type count M, then M lines "w h d". Everything after '#' on a line is ignored.
"""
import json
import logging
import os
import re
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError

from errors import InstanceError, InstanceParseError, PackingError, SolutionValidationError
from models import (BinSpec, CuttingPattern, Instance, ItemSpec, Node, NodeKind, Orientation, Solution,
                    layout, utilization)
from validation import validate

logger = logging.getLogger(__name__)

FORMATS = ("json", "text")
# expanded copies are held in memory
MAX_ITEM_COPIES = 1_000_000
_TOKEN = re.compile(r"\S+")


class BinDocument(BaseModel):
    id: Optional[int] = None
    width: int
    height: int
    quantity: Optional[int] = None


class ItemDocument(BaseModel):
    id: Optional[int] = None
    width: int
    height: int
    demand: int = 1


class InstanceDocument(BaseModel):
    name: str = "instance"
    rotation_allowed: Optional[bool] = None
    max_stages: Optional[int] = None
    bins: List[BinDocument]
    items: List[ItemDocument]


def _first_error(error):
    details = error.errors()
    if not details:
        return str(error)
    first = details[0]
    where = ".".join(str(part) for part in first.get("loc", ()))
    return f"{where}: {first.get('msg')}" if where else first.get("msg", str(error))


def build_instance(document, rotation_allowed=None):
    """Instance from a parsed document; CLI rotation override wins over the document flag"""
    rotation = rotation_allowed if rotation_allowed is not None else bool(document.rotation_allowed)
    copies = sum(max(item.demand, 0) for item in document.items)
    if copies > MAX_ITEM_COPIES:
        raise InstanceError(f"Instance {document.name!r} demands {copies} item copies, more than {MAX_ITEM_COPIES}")
    try:
        return Instance(
            name=document.name,
            rotation_allowed=rotation,
            max_stages=document.max_stages,
            bins=[BinSpec(id=spec.id if spec.id is not None else k, width=spec.width, height=spec.height,
                          quantity=spec.quantity or None)
                  for k, spec in enumerate(document.bins)],
            items=[ItemSpec(id=item.id if item.id is not None else k, width=item.width, height=item.height,
                            demand=item.demand)
                   for k, item in enumerate(document.items)],
        )
    except ValidationError as e:
        raise InstanceError(f"Invalid instance {document.name!r}: {_first_error(e)}")


def _tokens(text):
    for line_number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        for match in _TOKEN.finditer(content):
            yield match.group(0), line_number, match.start() + 1


class _TokenReader:
    def __init__(self, text):
        self._tokens = list(_tokens(text))
        self._position = 0
        self._last_line = max(1, len(text.splitlines()))

    def integer(self, what):
        if self._position >= len(self._tokens):
            raise InstanceParseError(f"unexpected end of input, expected {what}", self._last_line, 1)
        token, line, column = self._tokens[self._position]
        self._position += 1
        try:
            return int(token)
        except ValueError:
            raise InstanceParseError(f"expected integer {what}, got {token[:20]!r}", line, column)

    def finish(self):
        if self._position < len(self._tokens):
            token, line, column = self._tokens[self._position]
            raise InstanceParseError(f"unexpected trailing token {token[:20]!r}", line, column)


def _parse_text(text, name):
    reader = _TokenReader(text)
    bin_count = reader.integer("bin-type count")
    if bin_count < 1:
        raise InstanceError(f"bin-type count must be positive, got {bin_count}")
    bins = []
    for k in range(bin_count):
        width = reader.integer(f"width of bin type {k + 1}")
        height = reader.integer(f"height of bin type {k + 1}")
        quantity = reader.integer(f"quantity of bin type {k + 1}")
        if quantity < 0:
            raise InstanceError(f"bin type {k + 1} has negative quantity {quantity}")
        bins.append(BinDocument(width=width, height=height, quantity=quantity or None))
    item_count = reader.integer("item-type count")
    if item_count < 1:
        raise InstanceError(f"item-type count must be positive, got {item_count}")
    items = []
    for k in range(item_count):
        width = reader.integer(f"width of item type {k + 1}")
        height = reader.integer(f"height of item type {k + 1}")
        demand = reader.integer(f"demand of item type {k + 1}")
        items.append(ItemDocument(width=width, height=height, demand=demand))
    reader.finish()
    return InstanceDocument(name=name, bins=bins, items=items)


def _parse_json(text, name):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(e.msg, e.lineno, e.colno)
    except RecursionError:
        raise InstanceParseError("document nested too deeply", 1, 1)
    if isinstance(raw, dict) and "name" not in raw:
        raw = dict(raw, name=name)
    try:
        return InstanceDocument.model_validate(raw)
    except ValidationError as e:
        raise InstanceError(f"Malformed instance document: {_first_error(e)}")


def parse_instance(data, fmt, rotation_allowed=None, name="instance"):
    """Instance from raw bytes in the given format ("json" or "text")"""
    if fmt not in FORMATS:
        raise InstanceError(f"Unknown instance format {fmt!r}")
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else str(data)
    except UnicodeDecodeError as e:
        raise InstanceParseError(f"input is not UTF-8 ({e.reason})", 1, 1)

    try:
        document = _parse_json(text, name) if fmt == "json" else _parse_text(text, name)
    except ValueError as e:
        # int() refusing oversized literals and similar
        if isinstance(e, ValidationError):
            raise InstanceError(_first_error(e))
        raise InstanceParseError(str(e), 1, 1)
    return build_instance(document, rotation_allowed)


def detect_format(path):
    return "json" if path.lower().endswith(".json") else "text"


def load_instance(path, fmt=None, rotation_allowed=None):
    with open(path, "rb") as f:
        data = f.read()
    name = os.path.splitext(os.path.basename(path))[0]
    instance = parse_instance(data, fmt or detect_format(path), rotation_allowed=rotation_allowed, name=name)
    logger.debug(f"Loaded {instance.name} from {path}: {len(instance.bins)} bin type(s), "
                 f"{len(instance.items)} item type(s), {len(instance.copies)} copies")
    return instance


def instance_to_json(instance):
    document = InstanceDocument(
        name=instance.name,
        rotation_allowed=instance.rotation_allowed,
        max_stages=instance.max_stages,
        bins=[BinDocument(id=spec.id, width=spec.width, height=spec.height, quantity=spec.quantity)
              for spec in instance.bins],
        items=[ItemDocument(id=item.id, width=item.width, height=item.height, demand=item.demand)
               for item in instance.items],
    )
    return document.model_dump_json(indent=2, exclude_none=True).encode("utf-8")


class NodeDocument(BaseModel):
    id: int
    kind: NodeKind
    width: int
    height: int
    orientation: Optional[Orientation] = None
    item_id: Optional[int] = None
    copy_id: Optional[int] = None
    rotated: Optional[bool] = None
    children: List["NodeDocument"] = Field(default_factory=list)


NodeDocument.model_rebuild()


class PlacementDocument(BaseModel):
    item_id: int
    copy_id: int
    rotated: bool
    x: int
    y: int
    width: int
    height: int


class PatternDocument(BaseModel):
    bin_id: int
    width: int
    height: int
    stages: int
    item_count: int
    tree: NodeDocument
    placements: List[PlacementDocument]


class BinUsageDocument(BaseModel):
    bin_id: int
    count: int


class SolutionDocument(BaseModel):
    instance: str
    rotation_allowed: bool
    max_stages: Optional[int] = None
    params: dict = Field(default_factory=dict)
    seed: Optional[int] = None
    total_bin_area: int
    bin_count: int
    utilization: float
    bins_used: List[BinUsageDocument]
    patterns: List[PatternDocument]
    excluded: List[int] = Field(default_factory=list)


def _node_document(node):
    if node.kind is NodeKind.STRUCTURE:
        return NodeDocument(id=node.id, kind=node.kind, width=node.width, height=node.height,
                            orientation=node.orientation,
                            children=[_node_document(child) for child in node.children])
    if node.kind is NodeKind.ITEM:
        return NodeDocument(id=node.id, kind=node.kind, width=node.width, height=node.height,
                            item_id=node.item_id, copy_id=node.copy_id, rotated=node.rotated)
    return NodeDocument(id=node.id, kind=node.kind, width=node.width, height=node.height)


def solution_document(solution, instance, meta=None):
    meta = meta or {}
    usage = solution.bin_usage()
    return SolutionDocument(
        instance=instance.name,
        rotation_allowed=instance.rotation_allowed,
        max_stages=instance.max_stages,
        params=meta.get("params", {}),
        seed=meta.get("seed"),
        total_bin_area=solution.total_bin_area,
        bin_count=len(solution.patterns),
        utilization=utilization(solution),
        bins_used=[BinUsageDocument(bin_id=bin_id, count=usage[bin_id]) for bin_id in sorted(usage)],
        patterns=[
            PatternDocument(
                bin_id=pattern.bin.id,
                width=pattern.bin.width,
                height=pattern.bin.height,
                stages=pattern.stages(),
                item_count=len(pattern.item_nodes()),
                tree=_node_document(pattern.root),
                placements=[PlacementDocument(item_id=p.item_id, copy_id=p.copy_id, rotated=p.rotated,
                                              x=p.x, y=p.y, width=p.width, height=p.height)
                            for p in layout(pattern)],
            )
            for pattern in solution.patterns
        ],
        excluded=sorted(solution.excluded),
    )


def write_solution(solution, instance, meta=None):
    """Solution document as JSON bytes; refuses solutions that do not validate"""
    report = validate(instance, solution)
    if not report.ok:
        raise SolutionValidationError(report.violations)
    document = solution_document(solution, instance, meta)
    return document.model_dump_json(indent=2, exclude_none=True).encode("utf-8")


def _node_from_document(document):
    if document.kind is NodeKind.STRUCTURE:
        if document.orientation is None:
            raise PackingError(f"Structure node {document.id} has no orientation")
        return Node(document.id, NodeKind.STRUCTURE, document.width, document.height,
                    orientation=document.orientation,
                    children=[_node_from_document(child) for child in document.children])
    if document.kind is NodeKind.ITEM:
        return Node(document.id, NodeKind.ITEM, document.width, document.height,
                    copy_id=document.copy_id, item_id=document.item_id, rotated=bool(document.rotated))
    return Node.leftover(document.id, document.width, document.height)


def parse_solution_document(data):
    try:
        return SolutionDocument.model_validate_json(data)
    except ValidationError as e:
        raise PackingError(f"Malformed solution document: {_first_error(e)}")


def read_solution(data, instance):
    """Solution rebuilt from a document written by write_solution"""
    document = parse_solution_document(data)
    patterns = []
    for entry in document.patterns:
        spec = instance.bin_by_id(entry.bin_id)
        patterns.append(CuttingPattern(spec, _node_from_document(entry.tree)))
    return Solution(instance, patterns, list(document.excluded))
