import json
import random
import xml.etree.ElementTree as ET

import pytest

from conftest import greedy_solution, instance_path, make_instance
from errors import InstanceError, InstanceParseError, PackingError, SolutionValidationError
from instance_io import instance_to_json, load_instance, parse_instance, read_solution, write_solution
from models import utilization
from render import render_svg, save_svgs
from treeops import canonical_form
from validation import validate


def test_text_format():
    instance = parse_instance(b"1\n10 10 0\n1\n3 2 4\n", "text")
    assert len(instance.bins) == 1
    assert instance.bins[0].quantity is None
    assert (instance.items[0].width, instance.items[0].height, instance.items[0].demand) == (3, 2, 4)
    assert len(instance.copies) == 4
    assert not instance.rotation_allowed


def test_text_format_with_comments_and_quantities():
    text = "# two sheet sizes\n2\n10 10 3  # limited\n6 6 0\n2\n3 2 4\n6 6 1\n"
    instance = parse_instance(text.encode(), "text", rotation_allowed=True)
    assert [spec.quantity for spec in instance.bins] == [3, None]
    assert instance.rotation_allowed


def test_text_parse_error_has_position():
    with pytest.raises(InstanceParseError) as excinfo:
        parse_instance(b"1\n10 x 0\n1\n3 2 4\n", "text")
    assert (excinfo.value.line, excinfo.value.column) == (2, 4)
    assert str(excinfo.value).startswith("line 2, column 4:")


def test_truncated_and_trailing_input():
    with pytest.raises(InstanceParseError, match="unexpected end"):
        parse_instance(b"1\n10 10 0\n2\n3 2 4\n", "text")
    with pytest.raises(InstanceParseError, match="trailing"):
        parse_instance(b"1\n10 10 0\n1\n3 2 4\n7\n", "text")


def test_json_parse_error_has_position():
    with pytest.raises(InstanceParseError) as excinfo:
        parse_instance(b'{\n  "bins": [\n    {"width": 10,}\n  ]\n}', "json")
    assert excinfo.value.line == 3


@pytest.mark.parametrize("data, fmt", [
    (b"1\n10 10 0\n1\n0 2 1\n", "text"),
    (b"1\n10 10 0\n1\n11 2 1\n", "text"),
    (b"1\n10 10 -1\n1\n1 2 1\n", "text"),
    (b"0\n", "text"),
    (b'{"bins": [{"width": 10, "height": 10}], "items": []}', "json"),
    (b'{"bins": [{"width": 10, "height": 10}], "items": [{"width": 12, "height": 1}]}', "json"),
    (b'[1, 2]', "json"),
])
def test_semantic_errors(data, fmt):
    with pytest.raises(InstanceError):
        parse_instance(data, fmt)


def test_rotation_override_decides_feasibility():
    data = b'{"rotation_allowed": true, "bins": [{"width": 4, "height": 10}], "items": [{"width": 10, "height": 2}]}'
    assert parse_instance(data, "json").rotation_allowed
    with pytest.raises(InstanceError):
        parse_instance(data, "json", rotation_allowed=False)


def test_unknown_format():
    with pytest.raises(InstanceError):
        parse_instance(b"", "yaml")


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_garbage_input_only_raises_instance_errors(fmt):
    rng = random.Random(fmt)
    alphabet = b"0123456789 \n#{}[]:,\"-abcxyz.\t\xff"
    valid = b"1\n10 10 0\n1\n3 2 4\n" if fmt == "text" else instance_to_json(make_instance([(10, 10)], [(3, 2)]))
    for _ in range(500):
        if rng.random() < 0.5:
            data = bytes(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        else:
            mutated = bytearray(valid)
            for _ in range(rng.randint(1, 4)):
                mutated[rng.randrange(len(mutated))] = rng.choice(alphabet)
            data = bytes(mutated)
        try:
            parse_instance(data, fmt)
        except InstanceError:
            pass


def test_bundled_instances_load():
    assert load_instance(instance_path("tile_identical.txt")).name == "tile_identical"
    mixed = load_instance(instance_path("mixed_variable.json"))
    assert len(mixed.bins) == 2
    assert load_instance(instance_path("rotate_strip.json")).rotation_allowed
    with pytest.raises(InstanceError):
        load_instance(instance_path("rotate_strip.json"), rotation_allowed=False)


def test_canonical_document_keeps_every_field():
    instance = make_instance([(10, 10, 2), (6, 4)], [(3, 2, 4), (5, 5)], rotation_allowed=True)
    instance = instance.model_copy(update={"max_stages": 3})
    document = json.loads(instance_to_json(instance))
    assert document["max_stages"] == 3
    assert document["bins"][1] == {"id": 1, "width": 6, "height": 4}
    again = parse_instance(instance_to_json(instance), "json")
    assert again.model_dump() == instance.model_dump()


def test_solution_document_round_trip(strips_instance):
    solution = greedy_solution(strips_instance)
    data = write_solution(solution, strips_instance, {"seed": 3, "params": {"alpha": 1.2}})
    document = json.loads(data)
    assert document["bin_count"] == len(solution.patterns)
    assert document["total_bin_area"] == solution.total_bin_area
    assert document["seed"] == 3
    pattern = document["patterns"][0]
    assert pattern["item_count"] == len(pattern["placements"])
    assert pattern["stages"] == solution.patterns[0].stages()

    restored = read_solution(data, strips_instance)
    assert validate(strips_instance, restored).ok
    assert document["utilization"] == utilization(restored)
    assert [canonical_form(p.root) for p in restored.patterns] == [canonical_form(p.root) for p in solution.patterns]


def test_invalid_solution_is_not_written(strips_instance):
    solution = greedy_solution(strips_instance)
    solution.excluded.append(0)
    with pytest.raises(SolutionValidationError) as excinfo:
        write_solution(solution, strips_instance)
    assert excinfo.value.violations


def test_malformed_solution_document(strips_instance):
    with pytest.raises(PackingError):
        read_solution(b'{"instance": "x"}', strips_instance)


def test_svg_has_one_rect_per_piece(strips_instance, tmp_path):
    solution = greedy_solution(strips_instance)
    documents = render_svg(solution)
    assert len(documents) == len(solution.patterns)
    assert render_svg(solution) == documents
    for svg, pattern in zip(documents, solution.patterns):
        root = ET.fromstring(svg)
        rects = [element for element in root.iter() if element.tag.endswith("rect")]
        assert len(rects) == len(pattern.item_nodes()) + len(pattern.leftovers()) + 1

    paths = save_svgs(solution, str(tmp_path / "svg"))
    assert len(paths) == len(solution.patterns)
    assert all(path.endswith(".svg") for path in paths)
