import csv
import io
import json

import pytest

from rrcolor.cli import run
from rrcolor.graph import generate
from rrcolor.state import IndexState, is_member
from rrcolor.verification import BENCH_COLUMNS


def invoke(argv):
    out = io.StringIO()
    code = run(argv, out)
    return code, out.getvalue()


def test_sample_cycle_json():
    code, text = invoke(["sample", "--generate", "cycle:8", "--colors", "13", "--seed", "7"])
    assert code == 0
    data = json.loads(text)
    assert data["schema_version"] == 1
    (sample,) = data["samples"]
    g = generate("cycle", 8)
    assert is_member(sample["coloring"], IndexState.all_unrestricted(8, 13), g)
    m = sample["metrics"]
    assert m["total_steps"] == sum(m["steps_by_kind"].values())
    assert "wall_time_s" not in m


def test_identical_argv_identical_output():
    argv = ["sample", "--generate", "grid:3,3", "-k", "20", "--samples", "3", "--seed", "11"]
    assert invoke(argv) == invoke(argv)
    assert invoke(argv + ["--format", "csv"]) == invoke(argv + ["--format", "csv"])


def test_workers_keep_order():
    argv = ["sample", "--generate", "cycle:6", "-k", "13", "--samples", "4", "--seed", "3"]
    assert invoke(argv) == invoke(argv + ["--workers", "2"])


def test_hex_seed():
    a = invoke(["sample", "--generate", "path:4", "-k", "9", "--seed", "0x10"])
    b = invoke(["sample", "--generate", "path:4", "-k", "9", "--seed", "16"])
    assert a == b


def test_text_and_csv_formats():
    code, text = invoke(["sample", "--generate", "path:3", "-k", "9", "--format", "text"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("c sample 0 seed 0")
    assert [line.split()[0] for line in lines[1:]] == ["1", "2", "3"]
    code, text = invoke(["sample", "--generate", "path:3", "-k", "9", "--format", "csv"])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["sample", "node", "color"] and len(rows) == 4


def test_trace_potential():
    code, text = invoke(["sample", "--generate", "cycle:5", "-k", "13", "--trace-potential"])
    trace = json.loads(text)["samples"][0]["metrics"]["potential_trace"]
    assert trace[0][1] == "5" and trace[-1][1] == "0"


def test_graph_file(tmp_path):
    path = tmp_path / "tri.col"
    path.write_text("c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    code, text = invoke(["enumerate", "--graph", str(path), "-k", "3"])
    assert code == 0
    data = json.loads(text)
    assert data["count"] == 6
    assert data["colorings"][0] == [1, 2, 3]


def test_enumerate_csv():
    code, text = invoke(["enumerate", "--generate", "path:2", "-k", "2", "--format", "csv"])
    assert code == 0
    assert text == "node1,node2\n1,2\n2,1\n"


def test_budget_exceeded_exit_two(capsys):
    code, text = invoke(["sample", "--generate", "complete:3", "--colors", "2", "--seed", "1",
                         "--step-cap", "2000"])
    assert code == 2
    assert text == ""
    assert "budget exceeded" in capsys.readouterr().err


def test_warning_line_below_threshold(capsys):
    code, _ = invoke(["sample", "--generate", "cycle:4", "-k", "3"])
    assert code == 0
    err = capsys.readouterr().err
    assert "warning" in err and "3.637" in err
    invoke(["sample", "--generate", "cycle:4", "-k", "13"])
    assert "warning" not in capsys.readouterr().err


def test_warning_uses_exact_comparison(capsys):
    # alpha = 3.6374 exceeds the rounded 3.637 but not (7 + sqrt 57)/4.
    invoke(["sample", "--generate", "star:10000", "-k", "36375", "--format", "csv"])
    assert "warning" in capsys.readouterr().err
    invoke(["sample", "--generate", "star:10000", "-k", "36376", "--format", "csv"])
    assert "warning" not in capsys.readouterr().err


def test_verify_small():
    code, text = invoke(["verify", "--generate", "path:2", "-k", "3", "--samples", "3000", "--seed", "1"])
    assert code == 0
    data = json.loads(text)
    assert data["support_size"] == 6 and data["passed"]


def test_verify_without_colorings(capsys):
    code, _ = invoke(["verify", "--generate", "complete:3", "-k", "2", "--samples", "10"])
    assert code == 1
    assert "no proper" in capsys.readouterr().err


def test_drift_text():
    code, text = invoke(["drift", "--generate", "cycle:8", "-k", "13", "--steps", "500", "--format", "text"])
    assert code == 0
    assert text.rstrip().endswith("PASS")


def test_bench_csv_columns():
    code, text = invoke(["bench", "--family", "cycle", "--sizes", "16,32", "-k", "13", "--reps", "3",
                         "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == BENCH_COLUMNS
    assert [r[1] for r in rows[1:]] == ["16", "32"]


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "-k", "3"],
        ["sample", "--generate", "cycle:4", "--graph", "x", "-k", "3"],
        ["sample", "--generate", "cycle:4", "-k", "0"],
        ["sample", "--generate", "cycle:4", "-k", "3", "--seed", "-1"],
        ["sample", "--generate", "cycle:4", "-k", "3", "--seed", str(2**64)],
        ["sample", "--generate", "hypercube:3", "-k", "3"],
        ["sample", "--graph", "/nonexistent/file.col", "-k", "3"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert invoke(argv)[0] == 1


def test_parse_error_names_line(tmp_path, capsys):
    path = tmp_path / "bad.col"
    path.write_text("p edge 2 1\ne 1 3\n")
    code, _ = invoke(["sample", "--graph", str(path), "-k", "3"])
    assert code == 1
    assert "line 2" in capsys.readouterr().err
