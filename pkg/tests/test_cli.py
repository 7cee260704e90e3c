import csv
import io
import json

import pytest

from lipz.cli import run
from lipz.grid2d import grid_from_json
from lipz.rigidity import FolnerReport, RayProfile, RigidityDecomposition
from lipz.zline import EventuallyAffineMap, transposition


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return _write


def test_analyze_identity(write):
    path = write("id.json", {"orientation": 1, "offset": 0, "residual": []})
    code, out, _ = call("analyze", path)
    assert code == 0
    rep = json.loads(out)
    assert rep["sigma"] == 1 and rep["const"] == 0 and rep["conforms"] is True
    assert RigidityDecomposition.from_json(rep).to_json() == rep


def test_analyze_window_flag(write):
    path = write("t.json", transposition(0, 1).to_json())
    code, out, _ = call("analyze", path, "--window=-3..3")
    assert code == 0
    assert json.loads(out) == {"sigma": 1, "const": 0, "residual_sup": "1/1", "C": "4/1",
                               "conforms": True, "empirical": True}


def test_analyze_window_file_nonconforming(write):
    # a stretch: no bijection of Z looks like this, so the window bound fails
    path = write("w.json", {"start": 0, "values": [0, 4]})
    code, out, _ = call("analyze", path)
    assert code == 1
    assert json.loads(out)["conforms"] is False


def test_enumerate_count_only():
    assert call("enumerate", "--n", "3", "--k1", "2", "--k2", "2", "--count-only") == (0, "6\n", "")


def test_enumerate_report_and_emit(tmp_path):
    emit = tmp_path / "maps.jsonl"
    code, out, _ = call("enumerate", "--n", "4", "--k1", "3/2", "--k2", "2", "--emit", str(emit), "--threads", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["count"] == 2 and rep["k_forward"] == "3/2"
    lines = [json.loads(line) for line in emit.read_text().splitlines()]
    assert lines == [{"n": 4, "values": [0, 1, 2, 3]}, {"n": 4, "values": [3, 2, 1, 0]}]


def test_verify():
    assert call("verify", "--n", "5", "--k1", "1", "--k2", "1") == (0, "2 maps checked, 0 violations\n", "")


def test_verify_exit_one_on_violation(monkeypatch):
    from lipz import cli
    from lipz.enumerator import EnumResult, FiniteBijection

    monkeypatch.setattr(cli, "verify_theorem_over",
                        lambda spec, workers: EnumResult(1, [FiniteBijection((1, 0))]))
    code, out, _ = call("verify", "--n", "2", "--k1", "2", "--k2", "2")
    assert code == 1
    assert out.splitlines() == ["1 maps checked, 1 violations", '{"n": 2, "values": [1, 0]}']


def test_ray(write):
    path = write("t.json", transposition(0, 1).to_json())
    code, out, _ = call("ray", path, "--x", "0")
    assert code == 0
    rep = json.loads(out)
    assert (rep["case"], rep["region_lo"], rep["region_hi"], rep["width"], rep["centered"]) == ("below", 0, 1, 2, True)
    assert RayProfile.from_json(rep).to_json() == rep
    code, out, _ = call("ray", path, "--x", "-3")
    assert code == 0 and json.loads(out)["x"] == -3


def test_folner_csv(write):
    path = write("s.json", {"orientation": 1, "offset": 1, "residual": []})
    code, out, _ = call("folner", path, "--ns", "10,100")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["n", "intersection", "ratio_num", "ratio_den"], ["10", "20", "20", "21"], ["100", "200", "200", "201"]]


def test_grid_commands(write):
    path = write("shear.json", {"kind": "shear", "g": {"slope": 1, "offset": 0, "table": []}})
    code, out, _ = call("grid", "apply", path, "--point", "2,5")
    assert code == 0 and json.loads(out) == {"point": [2, 5], "image": [2, 7]}
    code, out, _ = call("grid", "lipschitz", path, "--n", "5")
    assert out.splitlines() == ["n,value_num,value_den,inverse_num,inverse_den", "5,2,1,2,1"]
    code, out, _ = call("grid", "isogap", path, "--n", "16")
    n, num, den = out.splitlines()[1].split(",")
    assert int(num) >= 8 and den == "1"
    code, out, _ = call("grid", "folner", path, "--n", "10")
    assert out.splitlines()[1] == "10,331,441"
    lin = write("lin.json", {"kind": "linear", "m": [1, 1, 0, 1]})
    assert json.loads(call("grid", "apply", lin, "--point", "2,5")[1])["image"] == [7, 5]


def test_byte_identical_output(write):
    path = write("t.json", transposition(0, 1).to_json())
    for argv in (("analyze", path), ("ray", path, "--x", "1"), ("folner", path, "--ns", "1,2,5"),
                 ("enumerate", "--n", "6", "--k1", "2", "--k2", "3")):
        assert call(*argv) == call(*argv)


def test_enumerate_independent_of_threads():
    a = call("enumerate", "--n", "7", "--k1", "2", "--k2", "2", "--threads", "1")
    b = call("enumerate", "--n", "7", "--k1", "2", "--k2", "2", "--threads", "2")
    assert a == b


def test_meta_flag(write):
    path = write("t.json", transposition(0, 1).to_json())
    code, out, _ = call("analyze", path, "--meta")
    assert code == 0 and "generated" in json.loads(out)["meta"]
    code, out, _ = call("folner", path, "--ns", "3", "--meta")
    assert out.startswith("# ")


@pytest.mark.parametrize("content, field", [
    ("{not json", "file"),
    ({"orientation": 1, "offset": 0, "residual": [[0, 1]]}, "residual"),
    ({"orientation": 3, "offset": 0, "residual": []}, "orientation"),
    ({"orientation": 1, "offset": 0.5, "residual": []}, "offset"),
])
def test_bad_map_files(write, content, field):
    path = write("bad.json", content)
    code, out, err = call("analyze", path)
    assert code == 2 and out == ""
    assert f": {field}" in err or f"error: {field}" in err


def test_bad_grid_file(write):
    path = write("g.json", {"kind": "linear", "m": [2, 0, 0, 1]})
    code, _, err = call("grid", "folner", path, "--n", "3")
    assert code == 2 and "map.m" in err


@pytest.mark.parametrize("argv", [
    ("enumerate", "--n", "3", "--k1", "x", "--k2", "1"),
    ("enumerate", "--n", "0", "--k1", "1", "--k2", "1"),
    ("enumerate", "--n", "3", "--k1", "1/2", "--k2", "1"),
    ("verify", "--n", "3", "--k1", "2"),
    ("analyze",),
    ("frobnicate",),
    ("enumerate", "--n", "3", "--k1", "1", "--k2", "1", "--bogus"),
])
def test_usage_errors_exit_two(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and err


def test_missing_file():
    code, _, err = call("analyze", "/nonexistent/map.json")
    assert code == 2 and "file" in err


def test_grid_apply_needs_point(write):
    path = write("tr.json", {"kind": "translation", "t": [1, 2]})
    code, _, err = call("grid", "apply", path)
    assert code == 2 and "point" in err


def test_golden_command_matches_frozen_table():
    from pathlib import Path

    code, out, _ = call("golden", "--max-n", "7")
    assert code == 0
    assert out == (Path(__file__).parent / "golden" / "counts.csv").read_text()


def test_report_schemas_round_trip():
    f = transposition(2, 3)
    assert EventuallyAffineMap.from_json(json.loads(json.dumps(f.to_json()))) == f
    rep = FolnerReport(4, 9)
    assert FolnerReport.from_json(json.loads(json.dumps(rep.to_json()))) == rep
    obj = {"kind": "composition", "maps": [{"kind": "translation", "t": [1, 0]}, {"kind": "linear", "m": [0, -1, 1, 0]}]}
    assert grid_from_json(obj) is not None
