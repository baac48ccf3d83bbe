from conftest import empty_pattern, greedy_solution, make_instance
from models import BinSpec, CuttingPattern, Node, Orientation, Solution
from validation import ACCOUNTING, BOUNDS, DIMENSIONS, QUANTITY, STRUCTURE, validate


def _pair_pattern(instance, first_width=3):
    a, b = instance.copies[:2]
    pattern = empty_pattern(8, 5)
    pattern.root = Node.structure(9, Orientation.V, [
        Node.item(1, a), Node.item(2, b), Node.leftover(3, 8 - first_width - b.width, 5),
    ])
    return pattern


def test_solver_output_passes(strips_instance, variable_instance):
    for instance in (strips_instance, variable_instance):
        report = validate(instance, greedy_solution(instance))
        assert report.ok, report.violations
        assert bool(report)


def test_empty_solution_passes(tile_instance):
    assert validate(tile_instance, Solution.empty(tile_instance)).ok


def test_child_widths_must_sum_to_parent():
    instance = make_instance([(8, 5)], [(3, 5), (2, 5)])
    pattern = _pair_pattern(instance)
    pattern.root.width = 9
    report = validate(instance, Solution(instance, [pattern], []))
    assert STRUCTURE in report.codes()
    assert BOUNDS in report.codes()


def test_copy_placed_twice_is_reported():
    instance = make_instance([(8, 5)], [(3, 5), (2, 5)])
    pattern = _pair_pattern(instance)
    report = validate(instance, Solution(instance, [pattern], [0]))
    assert ACCOUNTING in report.codes()


def test_missing_copy_is_reported():
    instance = make_instance([(8, 5)], [(3, 5), (2, 5), (1, 1)])
    report = validate(instance, Solution(instance, [_pair_pattern(instance)], []))
    assert any("accounted 0 times" in violation.message for violation in report.violations)


def test_rotation_without_permission():
    instance = make_instance([(8, 5)], [(5, 3)])
    pattern = empty_pattern(8, 5)
    pattern.root = Node.structure(3, Orientation.V, [Node.item(1, instance.copies[0], rotated=True),
                                                    Node.leftover(2, 5, 5)])
    report = validate(instance, Solution(instance, [pattern], []))
    assert DIMENSIONS in report.codes()


def test_wrong_item_dimensions():
    instance = make_instance([(8, 5)], [(3, 5), (2, 5)])
    pattern = _pair_pattern(instance)
    pattern.root.children[0].height = 4
    report = validate(instance, Solution(instance, [pattern], []))
    assert DIMENSIONS in report.codes()
    assert STRUCTURE in report.codes()


def test_normal_form_violations():
    instance = make_instance([(8, 5)], [(3, 5)])
    copy = instance.copies[0]
    pattern = empty_pattern(8, 5)
    pattern.root = Node.structure(9, Orientation.V, [
        Node.item(1, copy),
        Node.structure(4, Orientation.V, [Node.leftover(2, 2, 5), Node.leftover(3, 3, 5)]),
    ])
    report = validate(instance, Solution(instance, [pattern], []))
    messages = " ".join(violation.message for violation in report.violations)
    assert "repeats orientation" in messages
    assert "adjacent leftover" in messages


def test_single_child_structure_is_reported():
    instance = make_instance([(3, 5)], [(3, 5)])
    pattern = empty_pattern(3, 5)
    pattern.root = Node.structure(2, Orientation.H, [Node.item(1, instance.copies[0])])
    report = validate(instance, Solution(instance, [pattern], []))
    assert any("1 child" in violation.message for violation in report.violations)


def test_bin_quantity_bound():
    instance = make_instance([(5, 5, 1)], [(5, 5, 2)])
    spec = instance.bins[0]
    patterns = []
    for copy in instance.copies:
        pattern = CuttingPattern(spec, Node.item(0, copy))
        patterns.append(pattern)
    report = validate(instance, Solution(instance, patterns, []))
    assert report.codes() == {QUANTITY}


def test_unknown_bin_type():
    instance = make_instance([(5, 5)], [(5, 5)])
    foreign = BinSpec(id=7, width=5, height=5)
    report = validate(instance, Solution(instance, [CuttingPattern(foreign, Node.item(0, instance.copies[0]))], []))
    assert QUANTITY in report.codes()


def test_violation_strings_name_location():
    instance = make_instance([(8, 5)], [(3, 5), (2, 5)])
    report = validate(instance, Solution(instance, [_pair_pattern(instance)], [0]))
    assert str(report.violations[0]).startswith("[accounting] solution:")
