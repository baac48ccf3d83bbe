import json
import os
import shutil

import pandas as pd
import pytest

from bench import MEAN_UTILIZATION, SUM_OF_BINS, aggregate, bench, class_of
from conftest import instance_path
from convert_benchmark import main as convert_main
from convert_benchmark import parse_class_file
from instance_io import load_instance
from main import EXIT_INSTANCE, EXIT_NO_FEASIBLE, EXIT_OK, EXIT_ORACLE_BUDGET, EXIT_VALIDATION, main

FAST = ["--time-limit", "10", "--max-iterations", "200"]


def _solve(tmp_path, name, *extra):
    out = tmp_path / "solution.json"
    code = main(["--no-progress", "solve", "--instance", instance_path(name), "--out", str(out), *FAST, *extra])
    return code, out


def test_solve_writes_valid_solution_and_svgs(tmp_path):
    svg_dir = tmp_path / "svg"
    code, out = _solve(tmp_path, "tile_identical.txt", "--svg-dir", str(svg_dir))
    assert code == EXIT_OK
    document = json.loads(out.read_text())
    assert document["total_bin_area"] == 100
    assert document["bins_used"] == [{"bin_id": 0, "count": 1}]
    assert document["utilization"] == 100.0
    assert len(os.listdir(svg_dir)) == document["bin_count"]

    assert main(["--no-progress", "validate", "--instance", instance_path("tile_identical.txt"),
                 "--solution", str(out)]) == EXIT_OK


def test_solve_prints_to_stdout(capsys):
    code = main(["--no-progress", "solve", "--instance", instance_path("mixed_variable.json"), "--seed", "3", *FAST])
    assert code == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["instance"] == "mixed_variable"
    assert document["seed"] == 3
    assert document["total_bin_area"] == 72


def test_solve_with_threads_and_rotation(tmp_path):
    code, out = _solve(tmp_path, "rotate_strip.json", "--threads", "2", "--variant", "r")
    assert code == EXIT_OK
    document = json.loads(out.read_text())
    assert document["bin_count"] == 1
    assert document["rotation_allowed"] is True
    assert all(p["rotated"] for pattern in document["patterns"] for p in pattern["placements"])


@pytest.mark.parametrize("flag", ["--paper-strict-bin-open", "--open-without-fit-check"])
def test_bin_opening_flag(tmp_path, flag):
    code, out = _solve(tmp_path, "tile_identical.txt", flag)
    assert code == EXIT_OK
    document = json.loads(out.read_text())
    assert document["params"]["open_without_fit_check"] is True
    assert document["total_bin_area"] == 100


def test_fixed_orientation_makes_strip_instance_invalid(tmp_path):
    code, _ = _solve(tmp_path, "rotate_strip.json", "--variant", "o")
    assert code == EXIT_INSTANCE


def test_unreadable_instance(tmp_path):
    broken = tmp_path / "broken.txt"
    broken.write_text("1\n10 ten 0\n")
    assert main(["--no-progress", "solve", "--instance", str(broken), *FAST]) == EXIT_INSTANCE
    assert main(["--no-progress", "solve", "--instance", str(tmp_path / "missing.txt"), *FAST]) == EXIT_INSTANCE


def test_out_of_range_parameter(tmp_path):
    code, _ = _solve(tmp_path, "tile_identical.txt", "--beta", "1.5")
    assert code == EXIT_INSTANCE


def test_no_feasible_solution_exit_code(tmp_path):
    scarce = tmp_path / "scarce.txt"
    scarce.write_text("1\n4 10 1\n1\n4 10 2\n")
    code = main(["--no-progress", "solve", "--instance", str(scarce), *FAST])
    assert code == EXIT_NO_FEASIBLE


def test_tampered_solution_fails_validation(tmp_path):
    code, out = _solve(tmp_path, "small_strips.txt")
    assert code == EXIT_OK
    document = json.loads(out.read_text())
    document["excluded"] = [0]
    out.write_text(json.dumps(document))
    assert main(["--no-progress", "validate", "--instance", instance_path("small_strips.txt"),
                 "--solution", str(out)]) == EXIT_VALIDATION


def test_oracle_command(capsys):
    assert main(["--no-progress", "oracle", "--instance", instance_path("small_strips.txt")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["area"] == 96
    assert main(["--no-progress", "oracle", "--instance", instance_path("small_strips.txt"),
                 "--max-copies", "2"]) == EXIT_ORACLE_BUDGET


def _bench_dir(tmp_path):
    root = tmp_path / "instances"
    for folder, name in (("identical", "tile_identical.txt"), ("identical", "small_strips.txt"),
                         ("variable", "mixed_variable.json")):
        os.makedirs(root / folder, exist_ok=True)
        shutil.copy(instance_path(name), root / folder / name)
    return root


def test_bench_command_writes_reports(tmp_path):
    root = _bench_dir(tmp_path)
    out_dir = tmp_path / "report"
    code = main(["--no-progress", "bench", "--dir", str(root), "--out-dir", str(out_dir), *FAST])
    assert code == EXIT_OK

    rows = pd.read_csv(out_dir / "rows.csv")
    assert len(rows) == 3
    assert set(rows["status"]) == {"ok"}
    assert set(rows["class_name"]) == {"identical", "variable"}

    aggregates = pd.read_csv(out_dir / "aggregates.csv")
    identical = aggregates[aggregates["metric"] == SUM_OF_BINS]
    assert identical["value"].sum() == rows[rows["class_name"] == "identical"]["bins"].sum()
    variable = aggregates[aggregates["metric"] == MEAN_UTILIZATION]
    assert variable["value"].iloc[0] == pytest.approx(100 * 52 / 72)

    report = json.loads((out_dir / "report.json").read_text())
    assert len(report["rows"]) == 3


def test_bench_sweeps_and_failures(tmp_path):
    root = _bench_dir(tmp_path)
    (root / "identical" / "broken.txt").write_text("2\n10 10\n")
    report = bench(str(root), time_limit=[5.0, 10.0], threads=[1, 2], seeds=[0],
                   param_overrides={"max_iterations": 100})
    frame = report.frame()
    assert len(frame) == 4 * 4
    failed = frame[frame["status"] == "failed"]
    assert set(failed["instance"]) == {"broken"}
    assert failed["error"].str.contains("line").all()

    sweep = report.sweep()
    assert sorted(zip(sweep["threads"], sweep["time_limit"])) == [(1, 5.0), (1, 10.0), (2, 5.0), (2, 10.0)]
    assert (sweep["instances"] == 3).all()


def test_class_names(tmp_path):
    root = str(tmp_path)
    assert class_of(os.path.join(root, "class_03", "a.txt"), root) == "class_03"
    assert class_of(os.path.join(root, "cl05_040_01.txt"), root) == "cl05"
    assert class_of(os.path.join(root, "plain.txt"), root) == "all"


def test_aggregate_ignores_failures():
    frame = pd.DataFrame([
        dict(instance="a", class_name="c1", items=20, bin_types=1, threads=1, time_limit=1.0, seed=0,
             status="ok", bins=3, utilization=80.0),
        dict(instance="b", class_name="c1", items=20, bin_types=1, threads=1, time_limit=1.0, seed=0,
             status="ok", bins=4, utilization=70.0),
        dict(instance="c", class_name="c1", items=20, bin_types=1, threads=1, time_limit=1.0, seed=0,
             status="failed", bins=None, utilization=None),
    ])
    table = aggregate(frame)
    assert len(table) == 1
    assert table.iloc[0]["value"] == 7
    assert table.iloc[0]["instances"] == 2


CLASS_FILE = """\
    1           PROBLEM CLASS
    3           N. OF ITEMS
    1    1      RELATIVE AND ABSOLUTE N. OF INSTANCE
   10   12      HBIN,WBIN
    3    4      H(I),W(I),I=1,...,N
    3    4
    2    5

    1           PROBLEM CLASS
    2           N. OF ITEMS
    2    2      RELATIVE AND ABSOLUTE N. OF INSTANCE
   10   12      HBIN,WBIN
   10   12      H(I),W(I),I=1,...,N
    1    1
"""


def test_convert_class_file(tmp_path):
    blocks = parse_class_file(CLASS_FILE)
    assert [(block.relative, block.bin_width, block.bin_height) for block in blocks] == [(1, 12, 10), (2, 12, 10)]
    assert blocks[0].items == [(4, 3), (4, 3), (5, 2)]

    source = tmp_path / "Class_01.2bp"
    source.write_text(CLASS_FILE)
    out_dir = tmp_path / "converted"
    assert convert_main([str(source), "--out-dir", str(out_dir)]) == 0

    first = load_instance(str(out_dir / "class_01" / "cl01_003_01.txt"))
    assert (first.bins[0].width, first.bins[0].height, first.bins[0].quantity) == (12, 10, None)
    assert [(item.width, item.height, item.demand) for item in first.items] == [(4, 3, 2), (5, 2, 1)]
    assert os.path.exists(out_dir / "class_01" / "cl01_002_02.txt")
